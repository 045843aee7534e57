"""Experiment orchestration: data, grid search, metrics, verification.

Every run's randomness derives from the master seed through a single
documented split: SeedSequence(master_seed).generate_state(3 N) yields one
(system, inputs, noise) seed triple per run, so any table cell can be
regenerated in isolation.  Reports are a pure function of the experiment
configuration and serialize to byte-identical JSON on repeat runs on one
platform.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from seqprecond import dynsys, learners, precond
from seqprecond.poly import (
    ComplexSector,
    CoefficientVector,
    chebyshev_monic,
    differencing,
    legendre_monic,
)
from seqprecond.spectral import build_filter_bank

VARIANTS = ("none", "chebyshev", "legendre", "differencing", "learned", "custom")
ALGOS = ("regression", "spectral")

DEFAULT_LR_GRID = (1e-3, 1e-2, 1e-1)


@dataclass(frozen=True)
class GeneratorConfig:
    """Synthetic data source; defaults are the desk-scale protocol."""

    kind: str = "lds"  # lds | nonlinear
    d_h: int = 50
    d_in: int = 1
    d_out: int = 1
    tau: float = 0.01
    radius_lo: float = 0.9
    radius_hi: float = 1.0
    noise_sigma: float = 0.1
    basis_cond: float = 10.0


@dataclass(frozen=True)
class ExperimentSpec:
    algo: str = "regression"
    variant: str = "chebyshev"
    degree: int = 5
    custom_coeffs: tuple | None = None
    generator: GeneratorConfig | None = None
    csv_path: str | None = None
    lr_grid: tuple = DEFAULT_LR_GRID
    lr_grid_coeffs: tuple | None = None  # learned variant; defaults to lr_grid
    n_runs: int = 20
    horizon: int = 2000
    window: int = 200
    master_seed: int = 0
    num_taps: int | None = None
    domain_bound: float = learners.DEFAULT_DOMAIN_BOUND
    beta: float = 0.1
    filter_count: int = 24
    norm_bound: float = 1.0
    kappa_bound: float = 1.0
    oracle_comparator: bool = False

    def __post_init__(self):
        if self.generator is None and self.csv_path is None:
            object.__setattr__(self, "generator", GeneratorConfig())
        if isinstance(self.generator, dict):
            object.__setattr__(self, "generator", GeneratorConfig(**self.generator))
        for name in ("lr_grid", "lr_grid_coeffs", "custom_coeffs"):
            v = getattr(self, name)
            if isinstance(v, list):
                object.__setattr__(self, name, tuple(v))


@dataclass(frozen=True)
class MetricsReport:
    algo: str
    variant: str
    degree: int
    tau: float | None
    mean: float
    std: float
    mean_full_horizon: float
    chosen_lr: object  # float, [lr_model, lr_coeffs], or None for comparator
    per_run_final_errors: list
    per_run_full_errors: list
    grid_results: list
    config_hash: str
    master_seed: int
    seeds: list
    horizon: int
    window: int
    n_runs: int
    meta: dict = field(default_factory=dict)


def validate_spec(spec: ExperimentSpec) -> None:
    if spec.algo not in ALGOS:
        raise ValueError(f"unknown algorithm {spec.algo!r}")
    if spec.variant not in VARIANTS:
        raise ValueError(f"unknown variant {spec.variant!r}")
    if spec.n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    if not (1 <= spec.window <= spec.horizon):
        raise ValueError(f"need 1 <= window <= horizon, got W={spec.window}, T={spec.horizon}")
    if not spec.oracle_comparator and len(spec.lr_grid) == 0:
        raise ValueError("learning-rate grid must be nonempty")
    if spec.variant == "custom" and not spec.custom_coeffs:
        raise ValueError("custom variant requires custom_coeffs")
    if spec.oracle_comparator:
        if spec.csv_path is not None or spec.generator.kind != "lds":
            raise ValueError("oracle comparator needs a generated linear system")
        if spec.algo != "regression":
            raise ValueError("oracle comparator is defined for regression only")


def resolve_coefficients(spec: ExperimentSpec) -> CoefficientVector:
    """Map (variant, degree) to the fixed or initial coefficient vector.

    For 'none' the vector is the trivial [1] and degree only sets the
    number of learned input taps, keeping comparisons at equal capacity.
    """
    if spec.variant == "none":
        return CoefficientVector(np.array([1.0]))
    if spec.variant == "chebyshev" or spec.variant == "learned":
        return chebyshev_monic(spec.degree)
    if spec.variant == "legendre":
        return legendre_monic(spec.degree)
    if spec.variant == "differencing":
        return differencing()
    return CoefficientVector(np.asarray(spec.custom_coeffs, dtype=float))


def derive_seeds(master_seed: int, n_runs: int) -> list[int]:
    """The documented hash-split: 3 uint32 seeds per run, in run order."""
    state = np.random.SeedSequence(master_seed).generate_state(3 * n_runs)
    return [int(s) for s in state]


def spec_hash(spec: ExperimentSpec) -> str:
    payload = json.dumps(asdict(spec), sort_keys=True, default=str)
    return hashlib.sha256(payload.encode()).hexdigest()[:12]


def _make_run_data(spec: ExperimentSpec, seeds: list[int], r: int):
    g = spec.generator
    sys_seed, input_seed, noise_seed = seeds[3 * r : 3 * r + 3]
    if spec.csv_path is not None:
        traj = ingest_csv(spec.csv_path)
        return traj, None
    u = dynsys.gaussian_inputs(spec.horizon, g.d_in, input_seed)
    if g.kind == "lds":
        system = dynsys.sample_system(
            g.d_h, g.d_in, g.d_out, g.tau, g.radius_lo, g.radius_hi,
            sys_seed, noise_sigma=g.noise_sigma, basis_cond=g.basis_cond,
        )
        return dynsys.simulate_lds(system, u, seed=noise_seed), system
    if g.kind == "nonlinear":
        system = dynsys.sample_nonlinear_system(
            g.d_h, g.d_in, g.d_out, g.tau, g.radius_lo, g.radius_hi,
            sys_seed, noise_sigma=g.noise_sigma, basis_cond=g.basis_cond,
        )
        return dynsys.simulate_nonlinear(system, u, seed=noise_seed), None
    raise ValueError(f"unknown generator kind {g.kind!r}")


_BANK_CACHE: dict = {}


def _bank_for(horizon: int, beta: float, k: int):
    key = (horizon, beta, k)
    if key not in _BANK_CACHE:
        _BANK_CACHE[key] = build_filter_bank(horizon, ComplexSector(beta), k)
    return _BANK_CACHE[key]


def _build_learner(spec: ExperimentSpec, c, d_in: int, d_out: int, T: int, lr):
    taps = spec.num_taps if spec.num_taps is not None else max(spec.degree, 1)
    if spec.algo == "spectral":
        bank = _bank_for(T - c.degree - 1, spec.beta, spec.filter_count)
        return learners.SpectralLearner(
            c, bank, d_in, d_out, total_horizon=T,
            norm_bound=spec.norm_bound, kappa_bound=spec.kappa_bound, lr0=lr,
        )
    if spec.variant == "learned":
        lr_model, lr_coeffs = lr
        return learners.LearnedCoeffLearner(
            c, d_in, d_out, num_taps=taps, domain_bound=spec.domain_bound,
            lr_model0=lr_model, lr_coeffs0=lr_coeffs,
        )
    return learners.RegressionLearner(
        c, d_in, d_out, num_taps=taps, domain_bound=spec.domain_bound, lr0=lr,
    )


def _error_series(preds: np.ndarray, targets: np.ndarray) -> np.ndarray:
    return np.abs(preds - targets).sum(axis=1)


def run_experiment(spec: ExperimentSpec) -> MetricsReport:
    """Run one experiment configuration with a learning-rate grid search.

    The rate is chosen on the reported metric (final-window mean absolute
    error averaged over runs); full-horizon means are logged alongside so
    the regret-flavoured view stays available.  Ties break toward the
    smallest rate.
    """
    validate_spec(spec)
    c = resolve_coefficients(spec)
    seeds = derive_seeds(spec.master_seed, spec.n_runs)

    runs = []
    systems = []
    for r in range(spec.n_runs):
        traj, system = _make_run_data(spec, seeds, r)
        if spec.window > traj.horizon:
            raise ValueError(
                f"window {spec.window} exceeds data horizon {traj.horizon}"
            )
        runs.append(traj)
        systems.append(system)

    meta = {"coefficient_l1": c.l1, "seed_derivation": "SeedSequence(master).generate_state(3N)"}
    if systems[0] is not None:
        meta["spectra"] = [dynsys.spectrum_summary(s) for s in systems]

    if spec.oracle_comparator:
        finals, fulls = [], []
        for traj, system in zip(runs, systems):
            learner = learners.RegressionLearner(
                c, traj.inputs.shape[1], traj.outputs.shape[1],
                num_taps=max(c.degree, 1), frozen=True,
                init_Q=learners.oracle_weights(system, c),
            )
            errs = _error_series(learner.run(traj.inputs, traj.outputs), traj.outputs)
            finals.append(float(errs[-spec.window :].mean()))
            fulls.append(float(errs.mean()))
        return _finish_report(spec, c, None, finals, fulls, [], seeds, runs[0].horizon, meta)

    if spec.variant == "learned" and spec.algo == "regression":
        coeff_grid = spec.lr_grid_coeffs if spec.lr_grid_coeffs else spec.lr_grid
        grid = [(m, cc) for m in spec.lr_grid for cc in coeff_grid]
    else:
        grid = list(spec.lr_grid)

    grid_results = []
    for lr in grid:
        finals, fulls = [], []
        for traj in runs:
            learner = _build_learner(
                spec, c, traj.inputs.shape[1], traj.outputs.shape[1],
                traj.horizon, lr,
            )
            errs = _error_series(learner.run(traj.inputs, traj.outputs), traj.outputs)
            finals.append(float(errs[-spec.window :].mean()))
            fulls.append(float(errs.mean()))
        grid_results.append(
            {
                "lr": list(lr) if isinstance(lr, tuple) else lr,
                "mean": float(np.mean(finals)),
                "std": float(np.std(finals)),
                "mean_full_horizon": float(np.mean(fulls)),
                "per_run_final_errors": finals,
                "per_run_full_errors": fulls,
            }
        )

    def tie_key(entry):
        lr = entry["lr"]
        return (entry["mean"], tuple(lr) if isinstance(lr, list) else (lr,))

    winner = min(grid_results, key=tie_key)
    return _finish_report(
        spec, c, winner["lr"],
        winner["per_run_final_errors"], winner["per_run_full_errors"],
        [{k: v for k, v in g.items() if not k.startswith("per_run")} for g in grid_results],
        seeds, runs[0].horizon, meta,
    )


def _finish_report(spec, c, chosen_lr, finals, fulls, grid_results, seeds, horizon, meta):
    tau = spec.generator.tau if spec.csv_path is None else None
    return MetricsReport(
        algo=spec.algo,
        variant=spec.variant,
        degree=spec.degree,
        tau=tau,
        mean=float(np.mean(finals)),
        std=float(np.std(finals)),
        mean_full_horizon=float(np.mean(fulls)),
        chosen_lr=chosen_lr,
        per_run_final_errors=finals,
        per_run_full_errors=fulls,
        grid_results=grid_results,
        config_hash=spec_hash(spec),
        master_seed=spec.master_seed,
        seeds=seeds,
        horizon=horizon,
        window=spec.window,
        n_runs=spec.n_runs,
        meta=meta,
    )


def report_to_json(report: MetricsReport) -> str:
    return json.dumps(asdict(report), sort_keys=True, indent=2)


@dataclass(frozen=True)
class SweepFailure:
    config_hash: str
    error: str


def sweep(specs: list[ExperimentSpec], workers: int = 1) -> list:
    """Run several specs; failures are recorded, siblings continue.

    All specs are validated before any run starts; results come back in
    input order regardless of completion order.
    """
    if not specs:
        raise ValueError("sweep needs at least one spec")
    for spec in specs:
        validate_spec(spec)
    if workers <= 1 or len(specs) == 1:
        results = []
        for spec in specs:
            try:
                results.append(run_experiment(spec))
            except Exception as exc:  # noqa: BLE001 - reported, not swallowed
                results.append(SweepFailure(spec_hash(spec), str(exc)))
        return results
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(run_experiment, spec) for spec in specs]
        results = []
        for spec, fut in zip(specs, futures):
            try:
                results.append(fut.result())
            except Exception as exc:  # noqa: BLE001
                results.append(SweepFailure(spec_hash(spec), str(exc)))
    return results


def sweep_table_csv(reports: list) -> str:
    """Wide table: one row per (algorithm, tau) setting, one column per
    variant/degree, cells formatted mean±std."""
    ok = [r for r in reports if isinstance(r, MetricsReport)]
    cols = sorted({(r.variant, r.degree) for r in ok})
    rows = sorted({(r.algo, r.tau) for r in ok}, key=lambda k: (k[0], k[1] is None, k[1]))
    header = ["setting"] + [f"{v}-{d}" for v, d in cols]
    lines = [",".join(header)]
    cells = {}
    for r in ok:
        cells[(r.algo, r.tau), (r.variant, r.degree)] = f"{r.mean:.4g}±{r.std:.4g}"
    for row in rows:
        tag = f"{row[0]} tau={row[1]}" if row[1] is not None else f"{row[0]} csv"
        line = [tag] + [cells.get((row, col), "") for col in cols]
        lines.append(",".join(line))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# CSV exchange format


def write_trajectory_csv(traj: dynsys.Trajectory, path: str) -> None:
    """Schema: t,u_0..u_{din-1},y_0..y_{dout-1}; full float precision."""
    d_in = traj.inputs.shape[1]
    d_out = traj.outputs.shape[1]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(
            ["t"] + [f"u_{i}" for i in range(d_in)] + [f"y_{i}" for i in range(d_out)]
        )
        for t in range(traj.horizon):
            row = [t + 1]
            row += [repr(float(v)) for v in traj.inputs[t]]
            row += [repr(float(v)) for v in traj.outputs[t]]
            w.writerow(row)


def _parse_header(header: list[str]) -> tuple[int, int]:
    if not header or header[0] != "t":
        raise ValueError("malformed header: first column must be 't'")
    d_in = 0
    pos = 1
    while pos < len(header) and header[pos] == f"u_{d_in}":
        d_in += 1
        pos += 1
    d_out = 0
    while pos < len(header) and header[pos] == f"y_{d_out}":
        d_out += 1
        pos += 1
    if pos != len(header) or d_in == 0 or d_out == 0:
        if d_in == 0:
            expected = "u_0"
        elif pos < len(header) and header[pos].startswith("u"):
            expected = f"u_{d_in}"
        else:
            expected = f"y_{d_out}"
        bad = header[pos] if pos < len(header) else "(end of header)"
        raise ValueError(
            f"malformed header: expected column {expected!r}, found {bad!r}"
        )
    return d_in, d_out


def ingest_csv(path: str, standardize: bool = False) -> dynsys.Trajectory:
    """Parse a trajectory CSV, validating schema, continuity, and finiteness."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError("empty CSV") from None
        d_in, d_out = _parse_header([h.strip() for h in header])
        us, ys = [], []
        expected_t = None
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 1 + d_in + d_out:
                raise ValueError(f"row {lineno}: expected {1 + d_in + d_out} cells")
            try:
                t = int(row[0])
            except ValueError:
                raise ValueError(f"row {lineno}: non-integer t {row[0]!r}") from None
            if expected_t is not None and t != expected_t:
                raise ValueError(
                    f"row {lineno}: non-contiguous t (expected {expected_t}, got {t})"
                )
            expected_t = t + 1
            vals = []
            for j, cell in enumerate(row[1:], start=1):
                v = float(cell)
                if not math.isfinite(v):
                    raise ValueError(
                        f"row {lineno}, column {header[j]}: non-finite value"
                    )
                vals.append(v)
            us.append(vals[:d_in])
            ys.append(vals[d_in:])
    if not us:
        raise ValueError("CSV contains no data rows")
    u = np.array(us)
    y = np.array(ys)
    meta = {}
    if standardize:
        mu = y.mean(axis=0)
        sd = y.std(axis=0)
        sd = np.where(sd == 0, 1.0, sd)
        y = (y - mu) / sd
        meta = {"standardized": True, "y_mean": mu.tolist(), "y_std": sd.tolist()}
    return dynsys.Trajectory(
        u, y, seed=None, generator_tag=f"csv:{os.path.basename(path)}", meta=meta
    )


# ---------------------------------------------------------------------------
# verification suites (the release gate behind `usp verify`)


@dataclass(frozen=True)
class VerifyResult:
    suite: str
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class VerifyReport:
    results: list

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results)


def _check(fn):
    try:
        detail = fn()
        return True, detail or "ok"
    except AssertionError as exc:
        return False, str(exc) or "assertion failed"
    except Exception as exc:  # noqa: BLE001 - any crash is a failure
        return False, f"{type(exc).__name__}: {exc}"


def _poly_checks():
    from fractions import Fraction

    from seqprecond.poly import chebyshev_exact, eval_complex, sup_on_sector

    def sector_decay():
        worst = 0.0
        for n in range(1, 11):
            s = sup_on_sector(chebyshev_monic(n), ComplexSector(1 / (64 * n * n)), 128)
            worst = max(worst, s / 2.0 ** (2 - n))
            assert s <= 2.0 ** (2 - n), f"degree {n}: sup {s} exceeds {2.0 ** (2 - n)}"
        return f"worst ratio {worst:.3f}"

    def coefficient_growth():
        for n in range(1, 21):
            mx = max(abs(x) for x in chebyshev_exact(n))
            assert mx**10 <= Fraction(2) ** (3 * n), f"degree {n}: max coeff {float(mx)}"
        return "exact bound holds for degrees 1..20"

    def cosine_identity():
        theta = np.linspace(0, np.pi, 200)
        for n in (1, 5, 9):
            vals = eval_complex(chebyshev_monic(n), np.cos(theta).astype(complex))
            err = np.abs(vals - np.cos(n * theta) / 2 ** (n - 1)).max()
            assert err < 1e-12, f"degree {n}: deviation {err}"
        return "within 1e-12"

    def monic_guard():
        try:
            CoefficientVector(np.array([2.0, 0.0]))
        except ValueError as exc:
            assert "monic" in str(exc)
            return "corrupted leading coefficient rejected"
        raise AssertionError("non-monic vector was accepted")

    return [
        ("sector_decay_bound", sector_decay),
        ("coefficient_growth_bound", coefficient_growth),
        ("cosine_identity", cosine_identity),
        ("monic_guard", monic_guard),
    ]


def _spectral_checks():
    from scipy.integrate import dblquad

    from seqprecond.spectral import build_gram, filter_bank, gram_entry

    def diagonal_closed_form():
        for beta in (0.01, 0.5):
            s = ComplexSector(beta)
            for j in range(0, 65, 4):
                ref = beta * (1 / (j + 1) + 1 / (j + 3)) - np.sin(2 * beta) / (j + 2)
                assert abs(gram_entry(j, j, s) - ref) < 1e-12
        return "matches independent diagonal expression"

    def quadrature_spot():
        for j, k, beta in ((0, 2, 0.1), (3, 5, 0.5)):
            def f(th, r):
                return (1 - 2 * r**2 * np.cos(2 * th) + r**4) * r ** (j + k + 1) * np.cos((j - k) * th)

            q, _ = dblquad(f, 0, 1, -beta, beta, epsabs=1e-12)
            got = gram_entry(j, k, ComplexSector(beta))
            assert abs(got - q) < 1e-8, f"({j},{k},{beta}): {got} vs {q}"
        return "closed form matches quadrature"

    def eigendecay():
        beta, T = 0.1, 128
        Z = build_gram(T, ComplexSector(beta))
        w = np.linalg.eigvalsh(Z)
        assert w.min() >= -1e-10, f"min eigenvalue {w.min()}"
        assert np.trace(Z) <= 6 * beta * np.log(T)
        assert int((w > beta).sum()) <= 6 * np.log(T)
        return f"trace {np.trace(Z):.4f} <= {6 * beta * np.log(T):.4f}"

    def degenerate_guard():
        Z = build_gram(8, ComplexSector(0.0))
        try:
            filter_bank(Z, 2)
        except ValueError as exc:
            assert "degenerate" in str(exc)
            return "zero-measure sector flagged"
        raise AssertionError("all-zero Gram matrix was accepted")

    return [
        ("gram_diagonal_closed_form", diagonal_closed_form),
        ("gram_vs_quadrature", quadrature_spot),
        ("eigendecay", eigendecay),
        ("degenerate_sector_guard", degenerate_guard),
    ]


def _precond_checks():
    def round_trip():
        rng = np.random.default_rng(0)
        c = chebyshev_monic(4)
        y = rng.standard_normal((50, 2))
        z = precond.convolve(y, c)
        for t in range(50):
            hist = np.zeros((4, 2))
            for i in range(1, 5):
                if t - i >= 0:
                    hist[i - 1] = y[t - i]
            back = precond.reconstruct_prediction(z[t], hist, c)
            err = np.abs(back - y[t]).max()
            assert err < 1e-12, f"step {t}: {err}"
        return "reconstruct(convolve(y)) = y to 1e-12"

    def wrapper_error_identity():
        class Zero:
            def predict(self, u):
                return np.zeros(1)

            def update(self, residual):
                pass

        rng = np.random.default_rng(1)
        traj = dynsys.Trajectory(rng.standard_normal((30, 1)), rng.standard_normal((30, 1)))
        w = precond.PreconditionedOnline(Zero(), chebyshev_monic(3), 1)
        w.run(traj)
        err = np.abs(np.array(w.raw_errors) - np.array(w.precond_errors)).max()
        assert err < 1e-12, f"series deviate by {err}"
        return "raw and preconditioned error series coincide"

    return [
        ("convolve_reconstruct_identity", round_trip),
        ("wrapper_error_identity", wrapper_error_identity),
    ]


def _learner_checks():
    def ogd_regret():
        T = 1000
        learner = learners.RegressionLearner(
            CoefficientVector(np.array([1.0])), 1, 1, num_taps=1, domain_bound=1.0
        )
        u = np.ones((T, 1))
        y = np.full((T, 1), 2.0)
        preds = learner.run(u, y)
        losses = np.abs(preds - y).sum(axis=1)
        best = float(np.abs(1.0 - y).sum())  # best fixed point is the boundary
        regret = losses.sum() - best
        bound = 1.5 * 1.0 * 2.0 * np.sqrt(T)
        assert regret <= bound, f"regret {regret} > {bound}"
        return f"regret {regret:.3f} <= {bound:.1f}"

    def comparator_bound():
        n, T = 4, 60
        c = chebyshev_monic(n)
        eigs = np.random.default_rng(3).uniform(0, 0.9, 5)
        system = dynsys.system_from_eigenvalues(eigs, 1, 1, seed=4, basis_cond=3.0)
        u = dynsys.gaussian_inputs(T, 1, 5, normalize=True)
        traj = dynsys.simulate_lds(system, u)
        learner = learners.RegressionLearner(
            c, 1, 1, num_taps=n, frozen=True,
            init_Q=learners.oracle_weights(system, c),
        )
        errs = np.abs(learner.run(traj.inputs, traj.outputs) - traj.outputs)
        bound = (
            np.linalg.norm(system.C, 2) * np.linalg.norm(system.B, 2)
            * system.kappa * 2.0 ** (2 - n) * T
        )
        assert errs.max() <= bound, f"max err {errs.max()} > {bound}"
        return f"max error {errs.max():.2e} <= {bound:.2e}"

    def projection_idempotent():
        rng = np.random.default_rng(6)
        M = rng.standard_normal((4, 4)) * 5
        once = learners.project_to_ball(M, 1.0)
        twice = learners.project_to_ball(once, 1.0)
        err = np.abs(once - twice).max()
        assert err < 1e-12
        return "projecting twice equals projecting once"

    return [
        ("ogd_regret_bound", ogd_regret),
        ("oracle_weights_bound", comparator_bound),
        ("projection_idempotent", projection_idempotent),
    ]


def _dynsys_checks():
    def closed_form():
        system = dynsys.sample_system(5, 1, 1, 0.1, 0.2, 0.9, seed=7)
        u = dynsys.gaussian_inputs(20, 1, 8)
        traj = dynsys.simulate_lds(system, u)
        ref = np.zeros_like(traj.outputs)
        Ap = np.eye(5)
        powers = [np.eye(5)]
        for _ in range(19):
            Ap = Ap @ system.A
            powers.append(Ap)
        for t in range(20):
            for s in range(t + 1):
                ref[t] += system.C @ powers[t - s] @ system.B @ u[s]
        err = np.abs(traj.outputs - ref).max()
        assert err < 1e-8, f"deviation {err}"
        return "simulation matches explicit power sum"

    def determinism():
        a = dynsys.sample_system(4, 1, 1, 0.05, 0.5, 1.0, seed=11, noise_sigma=0.1)
        u = dynsys.gaussian_inputs(30, 1, 12)
        t1 = dynsys.simulate_lds(a, u, seed=13)
        t2 = dynsys.simulate_lds(a, u, seed=13)
        assert np.array_equal(t1.outputs, t2.outputs)
        return "same seeds, bit-identical outputs"

    return [("simulation_closed_form", closed_form), ("determinism", determinism)]


_SUITES = {
    "poly": _poly_checks,
    "spectral": _spectral_checks,
    "precond": _precond_checks,
    "learners": _learner_checks,
    "dynsys": _dynsys_checks,
}


def verify(suite: str = "all") -> VerifyReport:
    """Run the mathematical invariant suites; the CLI exits 2 on failure."""
    if suite == "all":
        names = list(_SUITES)
    elif suite in _SUITES:
        names = [suite]
    else:
        raise ValueError(f"unknown suite {suite!r}; options: all, {', '.join(_SUITES)}")
    results = []
    for sname in names:
        for cname, fn in _SUITES[sname]():
            passed, detail = _check(fn)
            results.append(VerifyResult(sname, cname, passed, detail))
    return VerifyReport(results)
