"""Command-line pipeline: symmetry scans, transform builds, entropy and VQE reports.

Each command writes delimited tables into --out together with a
``manifest.json`` recording the full run configuration; identical
configurations reproduce the tables byte for byte (the manifest timestamp
aside).  Unless --no-plot is given, a PNG rendering is written next to the
tables.

Column schemas:

    scan.csv                epsilon, n_sym, weight_below      ascending epsilon
    bounds.csv              stage, threshold, sigma, bound, exact, stage_bound
    profile.csv             cut, entropy                      nats, cut = left block size
    mutual_information.csv  qubit_i, qubit_j, mutual_information
    trajectory.csv          evaluation, stage, energy

``--hamiltonian`` accepts a JSON document path or, when the working directory
holds ``fixtures/registry.json``, a logical fixture name from that registry.
Exit codes: 0 success, 2 usage error, 3 invalid input document or run
configuration, 4 numerical non-convergence.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path

import click
import numpy as np

from . import __version__
from .hct import (HctTransform, ThresholdSchedule, build_hct, conjugate_by_hct,
                  fine_grid_schedule, scan_symmetries, violation_bound,
                  violation_norm)
from .pauli import PauliSum
from .solver import (ConvergenceError, basis_state, entropy_profile,
                     ground_state, mutual_information, permute_qubits)
from .vqe import (VqeRun, VqeStage, build_hwe_ansatz, energy, hct_vqe,
                  optimize, _energy_closure)

_EXACT_NORM_MAX = 12        # dense commutator norms above this are refused
_IMPROVE_TOL = 1e-4         # Ha; "improved on the reference" margin
_CHEM_PRECISION = 1.6e-3    # Ha; chemical-precision flag in summaries


class InputError(click.ClickException):
    """Unreadable or inconsistent input (exit 3)."""

    exit_code = 3


class ConvergenceFailure(click.ClickException):
    """Eigensolve or optimizer did not converge (exit 4)."""

    exit_code = 4


# ---------------------------------------------------------------- inputs

def load_registry(path: str | Path = "fixtures/registry.json") -> dict:
    """Logical fixture names to paths, resolved relative to the registry file."""
    p = Path(path)
    if not p.is_file():
        return {}
    try:
        data = json.loads(p.read_text())
    except ValueError as exc:
        raise InputError(f"unreadable registry {p}: {exc}")
    return {name: p.parent / rel for name, rel in data.items()}


def load_hamiltonian(spec: str) -> tuple[PauliSum, Path]:
    """A Hamiltonian document by path, or by registry name as a fallback."""
    path = Path(spec)
    if not path.is_file():
        hit = load_registry().get(spec)
        if hit is None:
            raise InputError(f"no file or registry entry named {spec!r}")
        path = hit
    try:
        H = PauliSum.from_json_dict(json.loads(path.read_text()))
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"invalid Hamiltonian document {path}: {exc}")
    return H, path


def load_pool(spec: str) -> list[tuple[str, PauliSum]]:
    """Labeled operator pool: {"n_qubits", "elements": [{"label", "terms"}]}."""
    path = Path(spec)
    if not path.is_file():
        raise InputError(f"no pool document at {path}")
    try:
        data = json.loads(path.read_text())
        n = int(data["n_qubits"])
        return [(el["label"],
                 PauliSum.from_label_terms(
                     [(t["coeff"], t["pauli"]) for t in el["terms"]], n=n))
                for el in data["elements"]]
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"invalid pool document {path}: {exc}")


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise click.UsageError(f"not a comma-separated float list: {text!r}")


def resolve_schedule(H: PauliSum, schedule: str | None,
                     fine_grid: float | None) -> ThresholdSchedule:
    """--schedule / --fine-grid to a ThresholdSchedule; both empty = exact only."""
    if schedule is not None and fine_grid is not None:
        raise click.UsageError("--schedule and --fine-grid are mutually exclusive")
    if fine_grid is not None:
        if not np.isfinite(fine_grid) or fine_grid <= 0:
            raise click.UsageError("--fine-grid must be positive and finite")
        return fine_grid_schedule(H, fine_grid)
    if not schedule:
        return ThresholdSchedule([])
    try:
        return ThresholdSchedule(_parse_floats(schedule))
    except ValueError as exc:
        raise click.UsageError(str(exc))


# ---------------------------------------------------------------- outputs

@dataclass(frozen=True)
class RunManifest:
    """What produced a result directory; equal fields (timestamp aside)
    reproduce the delimited outputs byte for byte."""

    command: str
    inputs: dict
    parameters: dict
    seed: int | None
    version: str
    timestamp: str


def write_manifest(out: Path, command: str, inputs: dict, parameters: dict,
                   seed: int | None = None) -> RunManifest:
    man = RunManifest(command, dict(inputs), dict(parameters), seed,
                      __version__,
                      datetime.now(timezone.utc).isoformat(timespec="seconds"))
    (out / "manifest.json").write_text(
        json.dumps(asdict(man), indent=2, sort_keys=True) + "\n")
    return man


def _write_csv(path: Path, header: list[str], rows) -> Path:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    return path


def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def _render_scan(rows, png: Path) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5.2, 3.4))
    if rows:
        eps = [r[0] for r in rows]
        ax.step(eps, [r[1] for r in rows], where="post", color="tab:blue")
        ax.set_xscale("log")
        twin = ax.twinx()
        twin.plot(eps, [r[2] for r in rows], color="tab:orange", alpha=0.7)
        twin.set_ylabel("coefficient weight below", color="tab:orange")
    ax.set_xlabel("truncation threshold")
    ax.set_ylabel("bare symmetries", color="tab:blue")
    fig.tight_layout()
    fig.savefig(png, dpi=150)
    plt.close(fig)


def _render_bounds(rows, png: Path) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5.2, 3.4))
    if rows:
        idx = np.arange(len(rows))
        ax.bar(idx, [r[3] for r in rows], color="tab:blue", alpha=0.6,
               label="bound")
        exact = [(i, r[4]) for i, r in enumerate(rows) if r[4] != ""]
        if exact:
            ax.plot([i for i, _ in exact], [v for _, v in exact], "k.",
                    label="exact")
        ax.set_xticks(idx, [r[2] for r in rows], rotation=90, fontsize=6)
        ax.legend(fontsize=8)
    ax.set_ylabel("commutator norm")
    fig.tight_layout()
    fig.savefig(png, dpi=150)
    plt.close(fig)


def _render_entropy(profile, mi, png: Path) -> None:
    plt = _pyplot()
    fig, (ax, ax2) = plt.subplots(1, 2, figsize=(8, 3.2))
    ax.plot(range(1, len(profile) + 1), profile, "o-", color="tab:blue")
    ax.set_xlabel("cut position")
    ax.set_ylabel("entanglement entropy [nats]")
    im = ax2.imshow(mi, cmap="magma")
    ax2.set_xlabel("qubit")
    ax2.set_ylabel("qubit")
    fig.colorbar(im, ax=ax2, label="mutual information")
    fig.tight_layout()
    fig.savefig(png, dpi=150)
    plt.close(fig)


def _render_trajectory(rows, reference, exact, png: Path) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5.2, 3.4))
    ax.plot([r[0] for r in rows], [r[2] for r in rows], color="tab:blue",
            lw=0.8)
    for a, b in zip(rows, rows[1:]):
        if b[1] != a[1]:
            ax.axvline(b[0], color="gray", lw=0.6, alpha=0.5)
    ax.axhline(reference, color="gray", ls="--", lw=0.8, label="reference")
    if exact is not None:
        ax.axhline(exact, color="black", ls=":", lw=0.8, label="exact")
    ax.set_xlabel("energy evaluation")
    ax.set_ylabel("energy")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(png, dpi=150)
    plt.close(fig)


# ---------------------------------------------------------------- commands

def cmd_scan(H: PauliSum, grid, out: Path, plot: bool = True) -> Path:
    """CSV of (epsilon, n_sym, weight_below) over the grid, epsilon ascending."""
    out.mkdir(parents=True, exist_ok=True)
    grid = list(grid)
    pairs = scan_symmetries(H, grid) if grid else []
    rows = sorted((e, nsym, sum((abs(c) for c in H.dropped_by(e)), 0.0))
                  for e, nsym in pairs)
    path = _write_csv(out / "scan.csv",
                      ["epsilon", "n_sym", "weight_below"], rows)
    if plot:
        _render_scan(rows, out / "scan.png")
    return path


def cmd_build(H: PauliSum, schedule: ThresholdSchedule, out: Path,
              plot: bool = True) -> dict:
    """Transform JSON, conjugated-sum JSON, and a per-sigma bound report.

    Each bounds.csv row satisfies exact <= bound <= stage_bound: the dense
    commutator norm (left blank above 12 qubits), its anticommuting
    coefficient bound, and twice the total weight below the stage threshold.
    """
    out.mkdir(parents=True, exist_ok=True)
    T = build_hct(H, schedule)
    T.validate()
    Ht = conjugate_by_hct(H, T)
    (out / "transform.json").write_text(
        json.dumps(T.to_json_dict(), indent=2) + "\n")
    (out / "conjugated.json").write_text(
        json.dumps(Ht.to_json_dict(), indent=2) + "\n")
    rows = []
    for i, thr, _, _, sigma in T.entries():
        exact = (violation_norm(Ht, sigma, exact=True)
                 if H.n <= _EXACT_NORM_MAX else "")
        rows.append((i, thr, sigma.label(), violation_norm(Ht, sigma), exact,
                     violation_bound(H, thr)))
    _write_csv(out / "bounds.csv",
               ["stage", "threshold", "sigma", "bound", "exact",
                "stage_bound"], rows)
    if plot:
        _render_bounds(rows, out / "bounds.png")
    return {"transform": T, "conjugated": Ht, "rows": rows}


def cmd_entropy(H: PauliSum, basis: str, out: Path,
                schedule: ThresholdSchedule | None = None, perm=None,
                plot: bool = True) -> dict:
    """Ground-state contiguous-cut entropies and pairwise mutual information.

    basis "original" analyzes H as given; "tapering" and "hct" analyze the
    conjugated sum.  Qubits are relabeled by ``perm`` (original index ->
    analysis position) before cutting; the default for transformed bases
    moves symmetry qubits to the front, exact stages first.
    """
    out.mkdir(parents=True, exist_ok=True)
    if basis not in ("original", "tapering", "hct"):
        raise InputError(f"unknown basis {basis!r}")
    T = None
    Hb = H
    if basis != "original":
        if basis == "hct" and schedule is None:
            raise InputError("hct basis needs a truncation schedule")
        T = build_hct(H, schedule if basis == "hct" else ThresholdSchedule([]))
        Hb = conjugate_by_hct(H, T)
    if perm is None:
        order = T.qubit_order() if T is not None else list(range(H.n))
        perm = [0] * H.n
        for pos, old in enumerate(order):
            perm[old] = pos
    perm = [int(q) for q in perm]
    if sorted(perm) != list(range(H.n)):
        raise InputError("perm must be a permutation of all qubit indices")
    try:
        g = ground_state(Hb)
    except ConvergenceError as exc:
        raise ConvergenceFailure(str(exc))
    psi = permute_qubits(g.state, perm)
    profile = entropy_profile(psi)
    mi = mutual_information(psi)
    _write_csv(out / "profile.csv", ["cut", "entropy"],
               list(enumerate(profile, start=1)))
    _write_csv(out / "mutual_information.csv",
               ["qubit_i", "qubit_j", "mutual_information"],
               [(i, j, mi[i, j]) for i in range(H.n)
                for j in range(i + 1, H.n)])
    if plot:
        _render_entropy(profile, mi, out / "entropy.png")
    return {"energy": g.energy, "profile": profile, "mi": mi, "perm": perm,
            "transform": T, "degenerate": g.degenerate}


def _reference_bits(H: PauliSum, hf_bits: str | None) -> str:
    bits = hf_bits if hf_bits is not None else H.metadata.get("hf_bitstring")
    if bits is None:
        raise InputError(
            "no reference bitstring: give --hf-bits or metadata hf_bitstring")
    return str(bits)


def run_vqe(H: PauliSum, basis: str, schedule: ThresholdSchedule | None = None,
            family: str = "hwe", depth: int = 1, pool=None,
            method: str | None = None, budget: int = 10000, tol: float = 1e-8,
            seed: int = 0, hf_bits: str | None = None,
            noise_std: float = 0.1) -> VqeRun:
    """One VQE run in the requested basis.

    "hct" and "tapering" run the warm-started hierarchy; "original" optimizes
    H directly with a hardware-efficient circuit over all qubits from the
    reference bitstring, no transform involved.
    """
    bits = _reference_bits(H, hf_bits)
    if basis in ("hct", "tapering"):
        if basis == "hct" and schedule is None:
            raise InputError("hct basis needs a truncation schedule")
        sched = schedule if basis == "hct" else ThresholdSchedule([])
        try:
            return hct_vqe(H, sched, family=family, depth=depth, pool=pool,
                           method=method, budget=budget, tol=tol, seed=seed,
                           hf_bits=bits, noise_std=noise_std)
        except ValueError as exc:
            raise InputError(str(exc))
    if basis != "original":
        raise InputError(f"unknown basis {basis!r}")
    if family != "hwe":
        raise InputError("original-basis runs support the hwe family only")
    ansatz = build_hwe_ansatz(H.n, (), depth, prelude_bits=bits)
    efun = _energy_closure(H)
    rng = np.random.default_rng(seed)
    x0 = rng.normal(0.0, noise_std, ansatz.n_parameters)
    res = optimize(lambda x: efun(ansatz.state(x).amplitudes), x0,
                   method=method or "cobyla", budget=budget, tol=tol)
    stage = VqeStage(0.0, (), ansatz.n_parameters, res.energy, res.n_evals,
                     res.converged)
    return VqeRun(H.n, family, seed, (), (stage,),
                  tuple((0, k, v) for k, v in enumerate(res.trajectory)),
                  res.energy, res.params, ansatz.state(res.params),
                  HctTransform(H.n, []))


def cmd_vqe(H: PauliSum, basis: str, out: Path,
            schedule: ThresholdSchedule | None = None, family: str = "hwe",
            depth: int = 1, pool=None, method: str | None = None,
            budget: int = 10000, tol: float = 1e-8, seed: int = 0,
            hf_bits: str | None = None, noise_std: float = 0.1,
            with_exact: bool = True, plot: bool = True) -> dict:
    """Trajectory CSV plus a summary with precision and improvement flags."""
    out.mkdir(parents=True, exist_ok=True)
    run = run_vqe(H, basis, schedule, family, depth, pool, method, budget,
                  tol, seed, hf_bits, noise_std)
    reference = energy(basis_state(H.n, _reference_bits(H, hf_bits)), H)
    exact = None
    if with_exact:
        try:
            eg, _ = ground_state(H)
        except ConvergenceError as exc:
            raise ConvergenceFailure(str(exc))
        exact = float(eg)
    rows = [(k + 1, si, v) for k, (si, _, v) in enumerate(run.trajectory)]
    _write_csv(out / "trajectory.csv", ["evaluation", "stage", "energy"], rows)
    err = None if exact is None else run.final_energy - exact
    summary = {
        "basis": basis,
        "family": family,
        "seed": seed,
        "budget": budget,
        "n_qubits": H.n,
        "thresholds": list(run.thresholds),
        "final_energy": run.final_energy,
        "n_evaluations": len(run.trajectory),
        "converged": bool(run.stages[-1].converged),
        "reference_energy": reference,
        "improved_on_reference": bool(reference - run.final_energy
                                      > _IMPROVE_TOL),
        "exact_energy": exact,
        "error_to_exact": err,
        "chemical_precision": None if err is None else bool(
            abs(err) <= _CHEM_PRECISION),
        "stages": [{"threshold": s.threshold,
                    "sym_qubits": list(s.sym_qubits),
                    "n_parameters": s.n_parameters,
                    "energy": s.energy,
                    "n_evals": s.n_evals,
                    "converged": s.converged} for s in run.stages],
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    if plot:
        _render_trajectory(rows, reference, exact, out / "trajectory.png")
    return {"run": run, "summary": summary}


# ---------------------------------------------------------------- click surface

_h_opt = click.option("--hamiltonian", required=True,
                      help="Hamiltonian JSON path or fixture registry name.")
_sched_opt = click.option("--schedule", default=None,
                          help="Comma-separated thresholds, strictly decreasing.")
_grid_opt = click.option("--fine-grid", type=float, default=None,
                         help="Every distinct coefficient magnitude at or "
                              "below this value.")
_out_opt = click.option("--out", default=".", show_default=True,
                        type=click.Path(file_okay=False),
                        help="Output directory.")
_noplot_opt = click.option("--no-plot", is_flag=True,
                           help="Skip PNG rendering.")


def _check_schedule_applies(basis: str, schedule, fine_grid) -> None:
    if basis != "hct" and (schedule is not None or fine_grid is not None):
        raise click.UsageError(
            "--schedule/--fine-grid apply to --basis hct only")
    if basis == "hct" and schedule is None and fine_grid is None:
        raise click.UsageError("--basis hct needs --schedule or --fine-grid")


@click.group()
@click.version_option(__version__, prog_name="hctkit")
def main() -> None:
    """Z2 symmetry scans, hierarchical Clifford transforms, entanglement
    reports, and warm-started VQE for qubit Hamiltonians."""


@main.command("scan")
@_h_opt
@_sched_opt
@_grid_opt
@_out_opt
@_noplot_opt
def scan_command(hamiltonian, schedule, fine_grid, out, no_plot):
    """Count bare symmetries of the truncated sum over a threshold grid."""
    H, src = load_hamiltonian(hamiltonian)
    if schedule is not None and fine_grid is not None:
        raise click.UsageError("--schedule and --fine-grid are mutually exclusive")
    if fine_grid is not None:
        if not np.isfinite(fine_grid) or fine_grid <= 0:
            raise click.UsageError("--fine-grid must be positive and finite")
        grid = list(fine_grid_schedule(H, fine_grid))
    elif schedule is not None:
        grid = _parse_floats(schedule)
    else:
        raise click.UsageError("give --schedule or --fine-grid")
    try:
        path = cmd_scan(H, grid, Path(out), plot=not no_plot)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    write_manifest(Path(out), "scan", {"hamiltonian": str(src)},
                   {"grid": grid, "plot": not no_plot})
    click.echo(f"wrote {path}")


@main.command("build")
@_h_opt
@_sched_opt
@_grid_opt
@_out_opt
@_noplot_opt
def build_command(hamiltonian, schedule, fine_grid, out, no_plot):
    """Build the transform, conjugate the sum, and report violation bounds."""
    H, src = load_hamiltonian(hamiltonian)
    sched = resolve_schedule(H, schedule, fine_grid)
    res = cmd_build(H, sched, Path(out), plot=not no_plot)
    write_manifest(Path(out), "build", {"hamiltonian": str(src)},
                   {"schedule": list(sched.thresholds), "plot": not no_plot})
    T = res["transform"]
    click.echo(f"{T.n_total_syms} symmetry qubits over {len(T.stages)} "
               f"stages; wrote {Path(out) / 'transform.json'}")


@main.command("entropy")
@_h_opt
@click.option("--basis", default="original", show_default=True,
              type=click.Choice(["original", "tapering", "hct"]))
@_sched_opt
@_grid_opt
@click.option("--perm", default=None,
              help="Comma-separated relabeling, original qubit -> position.")
@_out_opt
@_noplot_opt
def entropy_command(hamiltonian, basis, schedule, fine_grid, perm, out,
                    no_plot):
    """Ground-state entanglement profile and mutual information."""
    H, src = load_hamiltonian(hamiltonian)
    _check_schedule_applies(basis, schedule, fine_grid)
    sched = resolve_schedule(H, schedule, fine_grid) if basis == "hct" else None
    pm = None
    if perm is not None:
        try:
            pm = [int(t) for t in perm.split(",") if t.strip()]
        except ValueError:
            raise click.UsageError(f"not an integer list: {perm!r}")
    res = cmd_entropy(H, basis, Path(out), schedule=sched, perm=pm,
                      plot=not no_plot)
    write_manifest(Path(out), "entropy", {"hamiltonian": str(src)},
                   {"basis": basis,
                    "schedule": list(sched.thresholds) if sched else [],
                    "perm": res["perm"], "plot": not no_plot})
    if res["degenerate"]:
        click.echo("note: degenerate ground space, profile depends on the "
                   "eigenvector choice", err=True)
    click.echo(f"ground energy {res['energy']:.9f}; "
               f"wrote {Path(out) / 'profile.csv'}")


@main.command("vqe")
@_h_opt
@click.option("--basis", default="tapering", show_default=True,
              type=click.Choice(["original", "tapering", "hct"]))
@_sched_opt
@_grid_opt
@click.option("--family", default="hwe", show_default=True,
              type=click.Choice(["hwe", "pool"]))
@click.option("--depth", default=1, show_default=True, type=int,
              help="Entangling repetitions of the hardware-efficient circuit.")
@click.option("--pool", default=None, help="Operator pool JSON document.")
@click.option("--method", default=None,
              type=click.Choice(["cobyla", "trust-region", "lbfgs",
                                 "l-bfgs-b", "quasi-newton"]))
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--budget", default=10000, show_default=True, type=int,
              help="Total energy-evaluation budget across stages.")
@click.option("--hf-bits", default=None,
              help="Reference bitstring overriding metadata hf_bitstring.")
@click.option("--no-exact", is_flag=True,
              help="Skip the exact ground energy in the summary.")
@_out_opt
@_noplot_opt
def vqe_command(hamiltonian, basis, schedule, fine_grid, family, depth, pool,
                method, seed, budget, hf_bits, no_exact, out, no_plot):
    """Run VQE and write its trajectory and summary."""
    H, src = load_hamiltonian(hamiltonian)
    _check_schedule_applies(basis, schedule, fine_grid)
    sched = resolve_schedule(H, schedule, fine_grid) if basis == "hct" else None
    pl = load_pool(pool) if pool is not None else None
    res = cmd_vqe(H, basis, Path(out), schedule=sched, family=family,
                  depth=depth, pool=pl, method=method, budget=budget,
                  seed=seed, hf_bits=hf_bits, with_exact=not no_exact,
                  plot=not no_plot)
    write_manifest(Path(out), "vqe",
                   {"hamiltonian": str(src), "pool": pool or ""},
                   {"basis": basis,
                    "schedule": list(sched.thresholds) if sched else [],
                    "family": family, "depth": depth, "budget": budget,
                    "method": method or "cobyla", "hf_bits": hf_bits or "",
                    "plot": not no_plot}, seed=seed)
    s = res["summary"]
    click.echo(f"final energy {s['final_energy']:.9f} after "
               f"{s['n_evaluations']} evaluations")
    if not s["converged"]:
        raise ConvergenceFailure("optimizer budget exhausted before convergence")
