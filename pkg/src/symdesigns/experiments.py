"""Named experiments: validated configs in, deterministic record rows out.

Each experiment kind validates its own parameter table, plans resource use
for dry runs, and expands into independent work items.  Every item draws
randomness from a stream keyed by (seed, *item labels), so results do not
depend on scheduling and any thread count reproduces the same CSV bytes.
"""

from __future__ import annotations

import math
from concurrent.futures import FIRST_COMPLETED, ThreadPoolExecutor, wait

import numpy as np

from .bases import (
    BASIS_DENSE_MAX_DIM,
    EIGENBASIS_MAX_SITES,
    ORBIT_EIGENBASIS_MAX_SITES,
    MeasurementBasis,
    build_basis,
    computational_basis,
)
from .dynamics import (
    EvolutionPlan,
    IsingSpec,
    build_ising,
    deep_thermalization_scan,
    fit_power_law,
    relaxation_time_grid,
    rmt_baseline,
)
from .ensembles import (
    PROB_CUTOFF,
    delta_prime_t,
    ensemble_moment,
    projected_ensemble,
    violation,
)
from .errors import ConfigError, ContractError, ResourceBudgetError
from .geometry import SystemGeometry
from .linalg import rng_stream, sample_haar_state, trace_distance
from .moments import (
    REPLICA_DIM_MAX,
    columnwise_tensor_power,
    haar_moment,
    symmetric_ensemble_moment,
    z2_sigmax_projected_moment,
)
from .symmetries import build_projector, sample_symmetric_state

__all__ = ["EXPERIMENTS", "validate_config", "plan_experiment", "execute_experiment",
           "experiment_catalogue"]

MAX_TOTAL_SITES = 18
MAX_WORK_THREADS = 64

_SECTOR_PARAM_KEYS = {
    "translation": {"k"},
    "parity_flip": {"parity"},
    "reflection": {"site", "sign", "mirror"},
    "charge": {"charge"},
    "translation_reflection": {"k"},
    "composite": {"factors", "scale"},
}

_BASIS_PARAM_KEYS = {
    "computational": set(),
    "sigma_x": set(),
    "local_product": {"seed"},
    "global_haar": {"seed"},
    "mixed_last_site": {"alpha"},
    "shift_eigenbasis": {"power", "insertion_seed"},
}


# --- small validation helpers --------------------------------------------

def _is_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _as_float(value, where: str) -> float:
    if _is_int(value) or isinstance(value, float):
        return float(value)
    raise ConfigError(f"{where} must be a number, got {value!r}")


def _req(table: dict, key: str, where: str):
    if key not in table:
        raise ConfigError(f"missing required key {key!r} in {where}")
    return table[key]


def _int_of(value, where: str, minimum: int | None = None) -> int:
    if not _is_int(value):
        raise ConfigError(f"{where} must be an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{where} must be >= {minimum}, got {value}")
    return int(value)


def _int_list(value, where: str, minimum: int | None = None) -> list[int]:
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{where} must be a non-empty list of integers")
    return [_int_of(v, f"{where} entry", minimum) for v in value]


def _float_list(value, where: str) -> list[float]:
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{where} must be a non-empty list of numbers")
    return [_as_float(v, f"{where} entry") for v in value]


def _no_extra(table: dict, allowed: set, where: str):
    unknown = set(table) - allowed
    if unknown:
        raise ConfigError(f"unknown keys {sorted(unknown)} in {where}")


def _validate_sector_spec(spec, where: str) -> dict:
    if not isinstance(spec, dict):
        raise ConfigError(f"{where} must be a table with a 'kind' key")
    kind = _req(spec, "kind", where)
    if kind not in _SECTOR_PARAM_KEYS:
        raise ConfigError(
            f"{where}.kind: unknown sector kind {kind!r}; "
            f"expected one of {sorted(_SECTOR_PARAM_KEYS)}"
        )
    _no_extra(spec, _SECTOR_PARAM_KEYS[kind] | {"kind"}, where)
    if kind == "composite":
        factors = _req(spec, "factors", where)
        if not isinstance(factors, list) or not factors:
            raise ConfigError(f"{where}.factors must be a non-empty list of sector tables")
        for i, sub in enumerate(factors):
            _validate_sector_spec(sub, f"{where}.factors[{i}]")
    return dict(spec)


def _validate_basis_spec(spec, where: str) -> dict:
    if not isinstance(spec, dict):
        raise ConfigError(f"{where} must be a table with a 'family' key")
    family = _req(spec, "family", where)
    if family not in _BASIS_PARAM_KEYS:
        raise ConfigError(
            f"{where}.family: unknown basis family {family!r}; "
            f"expected one of {sorted(_BASIS_PARAM_KEYS)}"
        )
    _no_extra(spec, _BASIS_PARAM_KEYS[family] | {"family"}, where)
    if family == "mixed_last_site":
        alpha = _as_float(_req(spec, "alpha", where), f"{where}.alpha")
        if not 0.0 <= alpha <= 1.0:
            raise ConfigError(f"{where}.alpha must lie in [0, 1], got {alpha}")
    if family in ("local_product", "global_haar"):
        _int_of(_req(spec, "seed", where), f"{where}.seed", minimum=0)
    return dict(spec)


def _sector_tokens(spec: dict) -> tuple[str, str]:
    params = {k: v for k, v in spec.items() if k != "kind"}
    if spec["kind"] == "composite":
        detail = f"factors={len(spec['factors'])}"
    else:
        detail = ";".join(f"{k}={params[k]}" for k in sorted(params))
    return spec["kind"], detail


def _basis_tokens(spec: dict) -> tuple[str, str]:
    params = {k: v for k, v in spec.items() if k != "family"}
    detail = ";".join(f"{k}={params[k]}" for k in sorted(params))
    return spec["family"], detail


def _build_sector(spec: dict, n_sites: int, local_dim: int):
    spec = dict(spec)
    kind = spec.pop("kind")
    try:
        return build_projector(kind, n_sites, local_dim, **spec)
    except ContractError as exc:
        raise ConfigError(f"sector {kind!r} rejected for n={n_sites}: {exc}") from exc


def _build_basis(spec: dict, n_b: int, local_dim: int) -> MeasurementBasis:
    spec = dict(spec)
    family = spec.pop("family")
    try:
        return build_basis(family, n_b, local_dim, **spec)
    except ContractError as exc:
        raise ConfigError(f"basis {family!r} rejected for n_b={n_b}: {exc}") from exc


def _check_system_budget(n_total: int, local_dim: int, where: str):
    if n_total > MAX_TOTAL_SITES or local_dim**n_total > 2**MAX_TOTAL_SITES:
        raise ResourceBudgetError(
            f"{where}: total dimension {local_dim}**{n_total} exceeds "
            f"2**{MAX_TOTAL_SITES}"
        )


def _check_replica_budget(dim_a: int, t_values, where: str):
    worst = dim_a ** max(t_values)
    if worst > REPLICA_DIM_MAX:
        raise ResourceBudgetError(
            f"{where}: replica dimension {dim_a}**{max(t_values)} = {worst} "
            f"exceeds {REPLICA_DIM_MAX}"
        )


def _check_basis_budget(spec: dict, n_b: int, local_dim: int, where: str):
    dim_b = local_dim**n_b
    family = spec["family"]
    if family == "computational":
        return
    if family == "shift_eigenbasis":
        if "insertion_seed" in spec:
            if n_b > EIGENBASIS_MAX_SITES or dim_b > BASIS_DENSE_MAX_DIM:
                raise ResourceBudgetError(
                    f"{where}: shift eigenbasis with insertion limited to "
                    f"{EIGENBASIS_MAX_SITES} measured sites"
                )
        elif n_b > ORBIT_EIGENBASIS_MAX_SITES:
            raise ResourceBudgetError(
                f"{where}: shift eigenbasis limited to "
                f"{ORBIT_EIGENBASIS_MAX_SITES} measured sites"
            )
        return
    if dim_b > BASIS_DENSE_MAX_DIM:
        raise ResourceBudgetError(
            f"{where}: dense {family} basis of dim {dim_b} exceeds "
            f"{BASIS_DENSE_MAX_DIM}"
        )


# --- experiment kinds -----------------------------------------------------

class _ExperimentBase:
    name = "abstract"
    description = ""

    def validate(self, params: dict) -> dict:
        raise NotImplementedError

    def plan(self, params: dict, seed: int) -> dict:
        raise NotImplementedError

    def items(self, params: dict, seed: int) -> list:
        raise NotImplementedError

    def finalize(self, params: dict, rows: list[dict]) -> list[dict]:
        return rows

    def parameter_summary(self) -> dict:
        raise NotImplementedError


def _mean_rows(rows: list[dict], group_keys: list[str], metric_in: str,
               metric_out: str) -> list[dict]:
    """Aggregate matching rows into mean / stderr / sample_count rows."""
    groups: dict[tuple, list[dict]] = {}
    order: list[tuple] = []
    for row in rows:
        if row.get("metric") != metric_in:
            continue
        key = tuple(row.get(k) for k in group_keys)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(row)
    out = []
    for key in order:
        members = groups[key]
        values = np.array([r["value"] for r in members], dtype=np.float64)
        template = {k: members[0].get(k) for k in members[0]
                    if k not in ("value", "generator", "sample_index", "realization",
                                 "dropped_mass")}
        template["metric"] = metric_out
        template["value"] = float(values.mean())
        template["sample_count"] = len(values)
        if len(values) > 1:
            template["stderr"] = float(values.std(ddof=1) / math.sqrt(len(values)))
        out.append(template)
    return out


class DesignScan(_ExperimentBase):
    name = "design-scan"
    description = (
        "Moment distances of projected ensembles from random sector states, "
        "swept over the number of measured sites, with an optional benchmark "
        "from unconstrained random states."
    )

    def parameter_summary(self):
        return {
            "n_a": "kept sites (int)",
            "n_b_values": "measured-site counts to sweep (list of int)",
            "t_values": "moment orders (list of int, default [1, 2, 3])",
            "n_generators": "random states per point (int, default 10)",
            "sectors": "list of sector tables, each with kind=...",
            "basis": "basis table with family=... (default computational)",
            "include_haar": "also measure unconstrained random states (bool, default true)",
            "cutoff": "probability cutoff (float, default 1e-12)",
            "local_dim": "on-site dimension (int, default 2)",
        }

    def validate(self, params):
        where = "[params]"
        _no_extra(params, {"n_a", "n_b_values", "t_values", "n_generators", "sectors",
                           "basis", "include_haar", "cutoff", "local_dim"}, where)
        out = {
            "n_a": _int_of(_req(params, "n_a", where), "n_a", 1),
            "n_b_values": _int_list(_req(params, "n_b_values", where), "n_b_values", 1),
            "t_values": _int_list(params.get("t_values", [1, 2, 3]), "t_values", 1),
            "n_generators": _int_of(params.get("n_generators", 10), "n_generators", 1),
            "include_haar": bool(params.get("include_haar", True)),
            "cutoff": _as_float(params.get("cutoff", PROB_CUTOFF), "cutoff"),
            "local_dim": _int_of(params.get("local_dim", 2), "local_dim", 2),
        }
        sectors = _req(params, "sectors", where)
        if not isinstance(sectors, list) or not sectors:
            raise ConfigError("sectors must be a non-empty list of sector tables")
        out["sectors"] = [
            _validate_sector_spec(s, f"sectors[{i}]") for i, s in enumerate(sectors)
        ]
        out["basis"] = _validate_basis_spec(
            params.get("basis", {"family": "computational"}), "basis"
        )
        return out

    def plan(self, params, seed):
        d = params["local_dim"]
        dim_a = d ** params["n_a"]
        _check_replica_budget(dim_a, params["t_values"], self.name)
        for n_b in params["n_b_values"]:
            _check_system_budget(params["n_a"] + n_b, d, self.name)
            _check_basis_budget(params["basis"], n_b, d, self.name)
        n_curves = len(params["sectors"]) + (1 if params["include_haar"] else 0)
        n_items = n_curves * len(params["n_b_values"]) * params["n_generators"]
        return {
            "items": n_items,
            "max_dim": d ** (params["n_a"] + max(params["n_b_values"])),
            "replica_dim": dim_a ** max(params["t_values"]),
        }

    def items(self, params, seed):
        d = params["local_dim"]
        n_a = params["n_a"]
        t_values = params["t_values"]
        uniform = {t: haar_moment(d**n_a, t) for t in t_values}
        bases = {n_b: _build_basis(params["basis"], n_b, d) for n_b in params["n_b_values"]}
        basis_family, basis_detail = _basis_tokens(params["basis"])
        work = []

        def make_sector_item(s_idx, spec, n_b, gen):
            geom = SystemGeometry(n_a + n_b, n_a, local_dim=d)
            sector_name, sector_detail = _sector_tokens(spec)

            def run():
                sector = _build_sector(spec, geom.n_total, d)
                rng = rng_stream(seed, 0, s_idx, n_b, gen)
                sample = sample_symmetric_state(sector, rng, source_seed=seed)
                ens = projected_ensemble(sample.state, bases[n_b], geom, params["cutoff"])
                rows = []
                for t in t_values:
                    moment = ensemble_moment(ens, t)
                    rows.append({
                        "metric": "delta", "n_total": geom.n_total, "n_a": n_a,
                        "n_b": n_b, "local_dim": d, "sector": sector_name,
                        "sector_param": sector_detail, "basis": basis_family,
                        "basis_detail": basis_detail, "t": t, "generator": gen,
                        "value": trace_distance(moment, uniform[t]),
                        "dropped_mass": ens.dropped_mass,
                    })
                return rows

            return run

        def make_haar_item(n_b, gen):
            geom = SystemGeometry(n_a + n_b, n_a, local_dim=d)

            def run():
                rng = rng_stream(seed, 1, 0, n_b, gen)
                state = sample_haar_state(geom.dim, rng)
                ens = projected_ensemble(state, bases[n_b], geom, params["cutoff"])
                rows = []
                for t in t_values:
                    moment = ensemble_moment(ens, t)
                    rows.append({
                        "metric": "delta", "n_total": geom.n_total, "n_a": n_a,
                        "n_b": n_b, "local_dim": d, "sector": "haar",
                        "sector_param": "", "basis": basis_family,
                        "basis_detail": basis_detail, "t": t, "generator": gen,
                        "value": trace_distance(moment, uniform[t]),
                        "dropped_mass": ens.dropped_mass,
                    })
                return rows

            return run

        for s_idx, spec in enumerate(params["sectors"]):
            for n_b in params["n_b_values"]:
                for gen in range(params["n_generators"]):
                    work.append(make_sector_item(s_idx, spec, n_b, gen))
        if params["include_haar"]:
            for n_b in params["n_b_values"]:
                for gen in range(params["n_generators"]):
                    work.append(make_haar_item(n_b, gen))
        return work

    def finalize(self, params, rows):
        means = _mean_rows(rows, ["sector", "sector_param", "basis", "basis_detail",
                                  "n_b", "t"], "delta", "delta_mean")
        return rows + means


class ViolationScan(_ExperimentBase):
    name = "violation-scan"
    description = (
        "Identity-block deviation of measurement bases against sector "
        "operators, swept over system sizes; optionally per-outcome."
    )

    def parameter_summary(self):
        return {
            "n_a": "kept sites (int)",
            "n_b_values": "measured-site counts to sweep (list of int)",
            "sectors": "list of sector tables",
            "bases": "list of basis tables",
            "include_profile": "emit per-outcome rows (bool, default false)",
            "local_dim": "on-site dimension (int, default 2)",
        }

    def validate(self, params):
        where = "[params]"
        _no_extra(params, {"n_a", "n_b_values", "sectors", "bases",
                           "include_profile", "local_dim"}, where)
        out = {
            "n_a": _int_of(_req(params, "n_a", where), "n_a", 1),
            "n_b_values": _int_list(_req(params, "n_b_values", where), "n_b_values", 1),
            "include_profile": bool(params.get("include_profile", False)),
            "local_dim": _int_of(params.get("local_dim", 2), "local_dim", 2),
        }
        sectors = _req(params, "sectors", where)
        bases = _req(params, "bases", where)
        if not isinstance(sectors, list) or not sectors:
            raise ConfigError("sectors must be a non-empty list of sector tables")
        if not isinstance(bases, list) or not bases:
            raise ConfigError("bases must be a non-empty list of basis tables")
        out["sectors"] = [
            _validate_sector_spec(s, f"sectors[{i}]") for i, s in enumerate(sectors)
        ]
        out["bases"] = [
            _validate_basis_spec(b, f"bases[{i}]") for i, b in enumerate(bases)
        ]
        return out

    def plan(self, params, seed):
        d = params["local_dim"]
        for n_b in params["n_b_values"]:
            _check_system_budget(params["n_a"] + n_b, d, self.name)
            dim_b = d**n_b
            if dim_b > BASIS_DENSE_MAX_DIM:
                raise ResourceBudgetError(
                    f"{self.name}: violation sweeps need dense basis vectors; "
                    f"dim {dim_b} exceeds {BASIS_DENSE_MAX_DIM}"
                )
            for i, basis in enumerate(params["bases"]):
                _check_basis_budget(basis, n_b, d, f"{self.name}.bases[{i}]")
        n_items = len(params["sectors"]) * len(params["bases"]) * len(params["n_b_values"])
        return {"items": n_items,
                "max_dim": d ** (params["n_a"] + max(params["n_b_values"]))}

    def items(self, params, seed):
        d = params["local_dim"]
        n_a = params["n_a"]
        work = []

        def make_item(sector_spec, basis_spec, n_b):
            geom = SystemGeometry(n_a + n_b, n_a, local_dim=d)
            sector_name, sector_detail = _sector_tokens(sector_spec)
            basis_family, basis_detail = _basis_tokens(basis_spec)

            def run():
                sector = _build_sector(sector_spec, geom.n_total, d)
                basis = _build_basis(basis_spec, n_b, d)
                result = violation(sector, basis, geom)
                rows = [{
                    "metric": "violation_mean", "n_total": geom.n_total, "n_a": n_a,
                    "n_b": n_b, "local_dim": d, "sector": sector_name,
                    "sector_param": sector_detail, "basis": basis_family,
                    "basis_detail": basis_detail, "value": result.average,
                    "sample_count": basis.n_vectors,
                }]
                if params["include_profile"]:
                    for b_index, dev in enumerate(result.profile):
                        rows.append({
                            "metric": "violation_profile", "n_total": geom.n_total,
                            "n_a": n_a, "n_b": n_b, "local_dim": d,
                            "sector": sector_name, "sector_param": sector_detail,
                            "basis": basis_family, "basis_detail": basis_detail,
                            "b_index": b_index, "value": float(dev),
                        })
                return rows

            return run

        for sector_spec in params["sectors"]:
            for basis_spec in params["bases"]:
                for n_b in params["n_b_values"]:
                    work.append(make_item(sector_spec, basis_spec, n_b))
        return work


class MomentCheck(_ExperimentBase):
    name = "moment-check"
    description = (
        "Sampled moments against closed forms: sector-state moments against "
        "the projected symmetrizer, or projected-ensemble moments from "
        "spin-flip states against their analytic reference."
    )

    def parameter_summary(self):
        return {
            "mode": "'sector' or 'z2_projected' (default sector)",
            "n": "total sites (sector mode)",
            "sectors": "list of sector tables (sector mode)",
            "n_samples": "random states per check (sector mode, default 2000)",
            "n_a": "kept sites (z2_projected mode)",
            "n_b_values": "measured-site counts (z2_projected mode)",
            "parity": "flip-sector parity, 0 or 1 (z2_projected mode, default 0)",
            "n_generators": "states per point (z2_projected mode, default 10)",
            "t_values": "moment orders (list of int, default [1, 2])",
            "local_dim": "on-site dimension (int, default 2)",
        }

    def validate(self, params):
        where = "[params]"
        mode = params.get("mode", "sector")
        if mode not in ("sector", "z2_projected"):
            raise ConfigError(f"mode must be 'sector' or 'z2_projected', got {mode!r}")
        if mode == "sector":
            _no_extra(params, {"mode", "n", "sectors", "n_samples", "t_values",
                               "local_dim"}, where)
            sectors = _req(params, "sectors", where)
            if not isinstance(sectors, list) or not sectors:
                raise ConfigError("sectors must be a non-empty list of sector tables")
            return {
                "mode": mode,
                "n": _int_of(_req(params, "n", where), "n", 2),
                "sectors": [_validate_sector_spec(s, f"sectors[{i}]")
                            for i, s in enumerate(sectors)],
                "n_samples": _int_of(params.get("n_samples", 2000), "n_samples", 2),
                "t_values": _int_list(params.get("t_values", [1, 2]), "t_values", 1),
                "local_dim": _int_of(params.get("local_dim", 2), "local_dim", 2),
            }
        _no_extra(params, {"mode", "n_a", "n_b_values", "parity", "n_generators",
                           "t_values", "local_dim"}, where)
        return {
            "mode": mode,
            "n_a": _int_of(_req(params, "n_a", where), "n_a", 1),
            "n_b_values": _int_list(_req(params, "n_b_values", where), "n_b_values", 1),
            "parity": _int_of(params.get("parity", 0), "parity", 0),
            "n_generators": _int_of(params.get("n_generators", 10), "n_generators", 1),
            "t_values": _int_list(params.get("t_values", [1, 2]), "t_values", 1),
            "local_dim": _int_of(params.get("local_dim", 2), "local_dim", 2),
        }

    def plan(self, params, seed):
        d = params["local_dim"]
        if params["mode"] == "sector":
            dim = d ** params["n"]
            _check_system_budget(params["n"], d, self.name)
            _check_replica_budget(dim, params["t_values"], self.name)
            return {"items": len(params["sectors"]) * len(params["t_values"]),
                    "replica_dim": dim ** max(params["t_values"])}
        dim_a = d ** params["n_a"]
        _check_replica_budget(dim_a, params["t_values"], self.name)
        for n_b in params["n_b_values"]:
            _check_system_budget(params["n_a"] + n_b, d, self.name)
            _check_basis_budget({"family": "sigma_x"}, n_b, d, self.name)
        return {"items": len(params["n_b_values"]) * params["n_generators"]}

    def items(self, params, seed):
        if params["mode"] == "sector":
            return self._sector_items(params, seed)
        return self._z2_items(params, seed)

    def _sector_items(self, params, seed):
        d = params["local_dim"]
        n = params["n"]
        dim = d**n
        batch = 512
        work = []

        def make_item(s_idx, spec, t):
            sector_name, sector_detail = _sector_tokens(spec)

            def run():
                sector = _build_sector(spec, n, d)
                reference = symmetric_ensemble_moment(sector, t)
                replica_dim = dim**t
                accum = np.zeros((replica_dim, replica_dim), dtype=np.complex128)
                n_samples = params["n_samples"]
                done = 0
                chunk_index = 0
                while done < n_samples:
                    count = min(batch, n_samples - done)
                    rng = rng_stream(seed, s_idx, t, chunk_index)
                    states = np.empty((dim, count), dtype=np.complex128)
                    for i in range(count):
                        sample = sample_symmetric_state(sector, rng, source_seed=seed)
                        states[:, i] = sample.state
                    powers = columnwise_tensor_power(states, t)
                    accum += powers @ powers.conj().T
                    done += count
                    chunk_index += 1
                empirical = accum / n_samples
                value = trace_distance(empirical, reference)
                return [{
                    "metric": "moment_distance", "n_total": n, "local_dim": d,
                    "sector": sector_name, "sector_param": sector_detail, "t": t,
                    "sample_count": n_samples, "value": value,
                }]

            return run

        for s_idx, spec in enumerate(params["sectors"]):
            for t in params["t_values"]:
                work.append(make_item(s_idx, spec, t))
        return work

    def _z2_items(self, params, seed):
        d = params["local_dim"]
        n_a = params["n_a"]
        parity = params["parity"]
        t_values = params["t_values"]
        references = {t: z2_sigmax_projected_moment(n_a, t, parity) for t in t_values}
        uniform = {t: haar_moment(d**n_a, t) for t in t_values}
        work = []

        def make_item(n_b, gen):
            geom = SystemGeometry(n_a + n_b, n_a, local_dim=d)

            def run():
                sector = _build_sector({"kind": "parity_flip", "parity": parity},
                                       geom.n_total, d)
                basis = _build_basis({"family": "sigma_x"}, n_b, d)
                rng = rng_stream(seed, n_b, gen)
                sample = sample_symmetric_state(sector, rng, source_seed=seed)
                ens = projected_ensemble(sample.state, basis, geom, PROB_CUTOFF)
                rows = []
                for t in t_values:
                    moment = ensemble_moment(ens, t)
                    rows.append({
                        "metric": "delta_prime", "n_total": geom.n_total, "n_a": n_a,
                        "n_b": n_b, "local_dim": d, "sector": "parity_flip",
                        "sector_param": f"parity={parity}", "basis": "sigma_x",
                        "t": t, "generator": gen,
                        "value": trace_distance(moment, references[t]),
                        "dropped_mass": ens.dropped_mass,
                    })
                    rows.append({
                        "metric": "delta", "n_total": geom.n_total, "n_a": n_a,
                        "n_b": n_b, "local_dim": d, "sector": "parity_flip",
                        "sector_param": f"parity={parity}", "basis": "sigma_x",
                        "t": t, "generator": gen,
                        "value": trace_distance(moment, uniform[t]),
                        "dropped_mass": ens.dropped_mass,
                    })
                return rows

            return run

        for n_b in params["n_b_values"]:
            for gen in range(params["n_generators"]):
                work.append(make_item(n_b, gen))
        return work

    def finalize(self, params, rows):
        if params["mode"] == "sector":
            return rows
        means = _mean_rows(rows, ["n_b", "t", "metric"], "delta_prime", "delta_prime_mean")
        means += _mean_rows(rows, ["n_b", "t", "metric"], "delta", "delta_mean")
        return rows + means


class DynamicsScan(_ExperimentBase):
    name = "dynamics"
    description = (
        "Relaxation of projected-ensemble moment distances under chaotic "
        "Ising evolution from the all-zeros state, with optional bond and "
        "field disorder and power-law fits of the intermediate decay."
    )

    def parameter_summary(self):
        return {
            "n": "total sites (int)",
            "n_a": "kept sites (int, default 3)",
            "boundary": "'periodic', 'open', or 'weak_link' (default periodic)",
            "weak_link_coupling": "closing-bond coupling for weak_link (default 0.5)",
            "t_values": "moment orders (default [1, 2, 3])",
            "times": "table: log_start/log_stop/n_log/linear_start/linear_stop/"
                     "linear_step, or explicit = [...]",
            "basis": "basis table (default computational)",
            "cutoff": "probability cutoff (default 0.0: keep all outcomes)",
            "method": "'auto', 'dense', or 'krylov' (default auto)",
            "krylov_dim": "Lanczos subspace size (default 30)",
            "local_tol": "local error bound per step (default 1e-9)",
            "fit_window": "[lo, hi] for the power-law fit (default [1, 4])",
            "fit": "emit power-law fit rows (bool, default true)",
            "disorder_variance": "variance of bond and field noise (default 0)",
            "n_realizations": "noise realizations to average (default 1)",
        }

    def validate(self, params):
        where = "[params]"
        _no_extra(params, {"n", "n_a", "boundary", "weak_link_coupling", "t_values",
                           "times", "basis", "cutoff", "method", "krylov_dim",
                           "local_tol", "fit_window", "fit", "disorder_variance",
                           "n_realizations"}, where)
        out = {
            "n": _int_of(_req(params, "n", where), "n", 2),
            "n_a": _int_of(params.get("n_a", 3), "n_a", 1),
            "boundary": params.get("boundary", "periodic"),
            "weak_link_coupling": _as_float(params.get("weak_link_coupling", 0.5),
                                            "weak_link_coupling"),
            "t_values": _int_list(params.get("t_values", [1, 2, 3]), "t_values", 1),
            "cutoff": _as_float(params.get("cutoff", 0.0), "cutoff"),
            "method": params.get("method", "auto"),
            "krylov_dim": _int_of(params.get("krylov_dim", 30), "krylov_dim", 2),
            "local_tol": _as_float(params.get("local_tol", 1e-9), "local_tol"),
            "fit": bool(params.get("fit", True)),
            "disorder_variance": _as_float(params.get("disorder_variance", 0.0),
                                           "disorder_variance"),
            "n_realizations": _int_of(params.get("n_realizations", 1),
                                      "n_realizations", 1),
        }
        if out["boundary"] not in ("periodic", "open", "weak_link"):
            raise ConfigError(f"boundary must be periodic, open, or weak_link, "
                              f"got {out['boundary']!r}")
        if out["method"] not in ("auto", "dense", "krylov"):
            raise ConfigError(f"method must be auto, dense, or krylov, got {out['method']!r}")
        if out["n_a"] >= out["n"]:
            raise ConfigError(f"n_a must be smaller than n, got {out['n_a']} >= {out['n']}")
        if out["disorder_variance"] < 0:
            raise ConfigError("disorder_variance must be >= 0")
        if out["disorder_variance"] == 0 and out["n_realizations"] > 1:
            raise ConfigError("n_realizations > 1 requires disorder_variance > 0")
        window = params.get("fit_window", [1.0, 4.0])
        window = _float_list(window, "fit_window")
        if len(window) != 2 or window[0] >= window[1] or window[0] <= 0:
            raise ConfigError(f"fit_window must be [lo, hi] with 0 < lo < hi, got {window}")
        out["fit_window"] = (window[0], window[1])
        times = params.get("times", {})
        if not isinstance(times, dict):
            raise ConfigError("times must be a table")
        if "explicit" in times:
            _no_extra(times, {"explicit"}, "times")
            grid = np.array(_float_list(times["explicit"], "times.explicit"))
            if (np.diff(grid) < 0).any() or (grid < 0).any():
                raise ConfigError("times.explicit must be nonnegative and nondecreasing")
        else:
            _no_extra(times, {"log_start", "log_stop", "n_log", "linear_start",
                              "linear_stop", "linear_step"}, "times")
            grid = relaxation_time_grid(
                log_start=_as_float(times.get("log_start", 0.1), "times.log_start"),
                log_stop=_as_float(times.get("log_stop", 10.0), "times.log_stop"),
                n_log=_int_of(times.get("n_log", 25), "times.n_log", 2),
                linear_start=_as_float(times.get("linear_start", 12.0), "times.linear_start"),
                linear_stop=_as_float(times.get("linear_stop", 50.0), "times.linear_stop"),
                linear_step=_as_float(times.get("linear_step", 2.0), "times.linear_step"),
            )
        out["times"] = [float(x) for x in grid]
        out["basis"] = _validate_basis_spec(
            params.get("basis", {"family": "computational"}), "basis"
        )
        return out

    def plan(self, params, seed):
        _check_system_budget(params["n"], 2, self.name)
        _check_replica_budget(2 ** params["n_a"], params["t_values"], self.name)
        _check_basis_budget(params["basis"], params["n"] - params["n_a"], 2, self.name)
        if params["fit"]:
            lo, hi = params["fit_window"]
            inside = [t for t in params["times"] if lo <= t <= hi]
            if len(inside) < 4:
                raise ConfigError(
                    f"fit window [{lo}, {hi}] covers only {len(inside)} grid points; "
                    "need at least 4"
                )
        return {"items": params["n_realizations"], "max_dim": 2 ** params["n"],
                "time_points": len(params["times"])}

    def items(self, params, seed):
        n = params["n"]
        geom = SystemGeometry(n, params["n_a"])
        basis = _build_basis(params["basis"], geom.n_b, 2)
        basis_family, basis_detail = _basis_tokens(params["basis"])
        plan = EvolutionPlan(method=params["method"], krylov_dim=params["krylov_dim"],
                             local_tol=params["local_tol"])
        variance = params["disorder_variance"]
        work = []

        def make_item(realization):
            def run():
                if variance > 0:
                    child = int(np.random.SeedSequence(
                        [seed, 2, realization]).generate_state(1, np.uint64)[0])
                    spec = IsingSpec(n_sites=n, boundary=params["boundary"],
                                     weak_link_coupling=params["weak_link_coupling"],
                                     disorder_variance=variance, disorder_seed=child)
                else:
                    spec = IsingSpec(n_sites=n, boundary=params["boundary"],
                                     weak_link_coupling=params["weak_link_coupling"])
                ham = build_ising(spec)
                scan = deep_thermalization_scan(
                    ham, geom, t_values=params["t_values"], times=params["times"],
                    basis=basis, cutoff=params["cutoff"], plan=plan,
                )
                common = {
                    "n_total": n, "n_a": params["n_a"], "n_b": geom.n_b,
                    "local_dim": 2, "basis": basis_family, "basis_detail": basis_detail,
                    "boundary": params["boundary"], "realization": realization,
                }
                if variance > 0:
                    common["disorder_variance"] = variance
                rows = []
                for i, tau in enumerate(scan.times):
                    for t in scan.t_values:
                        rows.append({**common, "metric": "delta", "t": t,
                                     "tau": float(tau), "value": float(scan.deltas[t][i]),
                                     "dropped_mass": float(scan.dropped_mass[i])})
                    rows.append({**common, "metric": "schmidt_delta1", "tau": float(tau),
                                 "value": float(scan.schmidt_delta1[i])})
                    rows.append({**common, "metric": "schmidt_identity_gap",
                                 "tau": float(tau),
                                 "value": float(scan.schmidt_identity_gap[i])})
                    rows.append({**common, "metric": "energy", "tau": float(tau),
                                 "value": float(scan.energy[i])})
                    rows.append({**common, "metric": "norm_drift", "tau": float(tau),
                                 "value": float(scan.norm_drift[i])})
                return rows

            return run

        for realization in range(params["n_realizations"]):
            work.append(make_item(realization))
        return work

    def finalize(self, params, rows):
        out = list(rows)
        averaged = params["n_realizations"] > 1
        if averaged:
            out += _mean_rows(rows, ["t", "tau", "boundary"], "delta", "delta_mean")
        if params["fit"]:
            source_metric = "delta_mean" if averaged else "delta"
            for t in params["t_values"]:
                series = [(r["tau"], r["value"]) for r in out
                          if r.get("metric") == source_metric and r.get("t") == t]
                series.sort(key=lambda pair: pair[0])
                times = np.array([p[0] for p in series])
                values = np.array([p[1] for p in series])
                fit = fit_power_law(times, values, params["fit_window"])
                out.append({
                    "metric": "power_law_exponent", "n_total": params["n"],
                    "n_a": params["n_a"], "n_b": params["n"] - params["n_a"],
                    "local_dim": 2, "boundary": params["boundary"], "t": t,
                    "window_lo": fit.window[0], "window_hi": fit.window[1],
                    "value": fit.exponent, "stderr": fit.exponent_stderr,
                    "r_squared": fit.r_squared, "sample_count": fit.n_points,
                })
        return out


class RmtBaseline(_ExperimentBase):
    name = "rmt-baseline"
    description = (
        "Moment distances of random states drawn from a symmetry sector, "
        "the floor that symmetric chaotic dynamics relaxes to."
    )

    def parameter_summary(self):
        return {
            "n": "total sites (int)",
            "n_a": "kept sites (int, default 3)",
            "sector": "'translation' or 'translation_reflection' "
                      "(default translation_reflection)",
            "k": "momentum index (int, default 0)",
            "t_values": "moment orders (default [1, 2, 3])",
            "n_samples": "random sector states (default 10)",
            "basis": "basis table (default computational)",
            "cutoff": "probability cutoff (default 0.0)",
        }

    def validate(self, params):
        where = "[params]"
        _no_extra(params, {"n", "n_a", "sector", "k", "t_values", "n_samples",
                           "basis", "cutoff"}, where)
        out = {
            "n": _int_of(_req(params, "n", where), "n", 2),
            "n_a": _int_of(params.get("n_a", 3), "n_a", 1),
            "sector": params.get("sector", "translation_reflection"),
            "k": _int_of(params.get("k", 0), "k", 0),
            "t_values": _int_list(params.get("t_values", [1, 2, 3]), "t_values", 1),
            "n_samples": _int_of(params.get("n_samples", 10), "n_samples", 2),
            "cutoff": _as_float(params.get("cutoff", 0.0), "cutoff"),
        }
        if out["sector"] not in ("translation", "translation_reflection"):
            raise ConfigError("sector must be 'translation' or 'translation_reflection'")
        if out["n_a"] >= out["n"]:
            raise ConfigError(f"n_a must be smaller than n, got {out['n_a']} >= {out['n']}")
        out["basis"] = _validate_basis_spec(
            params.get("basis", {"family": "computational"}), "basis"
        )
        return out

    def plan(self, params, seed):
        _check_system_budget(params["n"], 2, self.name)
        _check_replica_budget(2 ** params["n_a"], params["t_values"], self.name)
        _check_basis_budget(params["basis"], params["n"] - params["n_a"], 2, self.name)
        return {"items": 1, "max_dim": 2 ** params["n"]}

    def items(self, params, seed):
        geom = SystemGeometry(params["n"], params["n_a"])
        basis = _build_basis(params["basis"], geom.n_b, 2)
        basis_family, basis_detail = _basis_tokens(params["basis"])

        def run():
            result = rmt_baseline(
                geom, sector=params["sector"], k=params["k"],
                t_values=params["t_values"], n_samples=params["n_samples"],
                seed=seed, basis=basis, cutoff=params["cutoff"],
            )
            common = {
                "n_total": params["n"], "n_a": params["n_a"], "n_b": geom.n_b,
                "local_dim": 2, "sector": params["sector"],
                "sector_param": f"k={params['k']}", "basis": basis_family,
                "basis_detail": basis_detail,
            }
            rows = []
            for t in params["t_values"]:
                for i, value in enumerate(result.samples[t]):
                    rows.append({**common, "metric": "delta", "t": t,
                                 "sample_index": i, "value": float(value)})
                rows.append({**common, "metric": "delta_mean", "t": t,
                             "value": result.mean(t), "stderr": result.stderr(t),
                             "sample_count": params["n_samples"]})
            return rows

        return [run]


class TransitionScan(_ExperimentBase):
    name = "transition-scan"
    description = (
        "Moment distances while the final measured site's basis is tilted "
        "from the symmetry-respecting axis to the computational one, with "
        "the accompanying violation averages."
    )

    def parameter_summary(self):
        return {
            "n_values": "total site counts (list of int)",
            "n_a": "kept sites (int, default 3)",
            "alpha_values": "tilt parameters in [0, 1] (list of float)",
            "t_values": "moment orders (default [2, 3])",
            "n_generators": "random sector states per size (default 10)",
            "parity": "flip-sector parity, 0 or 1 (default 0)",
            "include_violation": "also record violation averages (default true)",
            "cutoff": "probability cutoff (default 1e-12)",
        }

    def validate(self, params):
        where = "[params]"
        _no_extra(params, {"n_values", "n_a", "alpha_values", "t_values",
                           "n_generators", "parity", "include_violation", "cutoff"}, where)
        out = {
            "n_values": _int_list(_req(params, "n_values", where), "n_values", 2),
            "n_a": _int_of(params.get("n_a", 3), "n_a", 1),
            "alpha_values": _float_list(_req(params, "alpha_values", where), "alpha_values"),
            "t_values": _int_list(params.get("t_values", [2, 3]), "t_values", 1),
            "n_generators": _int_of(params.get("n_generators", 10), "n_generators", 1),
            "parity": _int_of(params.get("parity", 0), "parity", 0),
            "include_violation": bool(params.get("include_violation", True)),
            "cutoff": _as_float(params.get("cutoff", PROB_CUTOFF), "cutoff"),
        }
        if out["parity"] not in (0, 1):
            raise ConfigError(f"parity must be 0 or 1, got {out['parity']}")
        for alpha in out["alpha_values"]:
            if not 0.0 <= alpha <= 1.0:
                raise ConfigError(f"alpha_values entries must lie in [0, 1], got {alpha}")
        for n in out["n_values"]:
            if out["n_a"] >= n:
                raise ConfigError(f"n_a must be smaller than every n, got {out['n_a']} >= {n}")
        return out

    def plan(self, params, seed):
        _check_replica_budget(2 ** params["n_a"], params["t_values"], self.name)
        for n in params["n_values"]:
            _check_system_budget(n, 2, self.name)
            _check_basis_budget({"family": "mixed_last_site", "alpha": 0.5},
                                n - params["n_a"], 2, self.name)
        n_items = len(params["n_values"]) * params["n_generators"]
        if params["include_violation"]:
            n_items += len(params["n_values"]) * len(params["alpha_values"])
        return {"items": n_items, "max_dim": 2 ** max(params["n_values"])}

    def items(self, params, seed):
        n_a = params["n_a"]
        t_values = params["t_values"]
        uniform = {t: haar_moment(2**n_a, t) for t in t_values}
        bases = {
            (n, alpha): _build_basis({"family": "mixed_last_site", "alpha": alpha},
                                     n - n_a, 2)
            for n in params["n_values"] for alpha in params["alpha_values"]
        }
        work = []

        parity = params["parity"]

        def make_state_item(n, gen):
            geom = SystemGeometry(n, n_a)

            def run():
                sector = _build_sector({"kind": "parity_flip", "parity": parity}, n, 2)
                rng = rng_stream(seed, 0, n, gen)
                sample = sample_symmetric_state(sector, rng, source_seed=seed)
                rows = []
                for alpha in params["alpha_values"]:
                    ens = projected_ensemble(sample.state, bases[(n, alpha)], geom,
                                             params["cutoff"])
                    for t in t_values:
                        moment = ensemble_moment(ens, t)
                        rows.append({
                            "metric": "delta", "n_total": n, "n_a": n_a,
                            "n_b": geom.n_b, "local_dim": 2, "sector": "parity_flip",
                            "sector_param": f"parity={parity}",
                            "basis": "mixed_last_site", "alpha": float(alpha),
                            "t": t, "generator": gen,
                            "value": trace_distance(moment, uniform[t]),
                            "dropped_mass": ens.dropped_mass,
                        })
                return rows

            return run

        def make_violation_item(n, alpha):
            geom = SystemGeometry(n, n_a)

            def run():
                sector = _build_sector({"kind": "parity_flip", "parity": parity}, n, 2)
                result = violation(sector, bases[(n, alpha)], geom)
                return [{
                    "metric": "violation_mean", "n_total": n, "n_a": n_a,
                    "n_b": geom.n_b, "local_dim": 2, "sector": "parity_flip",
                    "sector_param": f"parity={parity}", "basis": "mixed_last_site",
                    "alpha": float(alpha), "value": result.average,
                    "sample_count": geom.dim_b,
                }]

            return run

        for n in params["n_values"]:
            for gen in range(params["n_generators"]):
                work.append(make_state_item(n, gen))
        if params["include_violation"]:
            for n in params["n_values"]:
                for alpha in params["alpha_values"]:
                    work.append(make_violation_item(n, alpha))
        return work

    def finalize(self, params, rows):
        means = _mean_rows(rows, ["n_total", "alpha", "t"], "delta", "delta_mean")
        return rows + means


EXPERIMENTS: dict[str, _ExperimentBase] = {
    exp.name: exp for exp in [
        DesignScan(), ViolationScan(), MomentCheck(), DynamicsScan(),
        RmtBaseline(), TransitionScan(),
    ]
}


def experiment_catalogue() -> dict:
    return {
        name: {"description": exp.description, "parameters": exp.parameter_summary()}
        for name, exp in sorted(EXPERIMENTS.items())
    }


# --- config handling and execution ---------------------------------------

def validate_config(config: dict) -> dict:
    """Check a parsed TOML document and normalize it.

    Returns {kind, seed, threads, tag, csv, metadata, params}; raises
    ConfigError naming the offending field otherwise.
    """
    if not isinstance(config, dict):
        raise ConfigError("config root must be a table")
    _no_extra(config, {"experiment", "output", "params"}, "config")
    exp_table = _req(config, "experiment", "config")
    if not isinstance(exp_table, dict):
        raise ConfigError("[experiment] must be a table")
    _no_extra(exp_table, {"kind", "seed", "threads", "tag"}, "[experiment]")
    kind = _req(exp_table, "kind", "[experiment]")
    if kind not in EXPERIMENTS:
        raise ConfigError(
            f"[experiment].kind: unknown experiment {kind!r}; "
            f"expected one of {sorted(EXPERIMENTS)}"
        )
    seed = _int_of(_req(exp_table, "seed", "[experiment]"), "[experiment].seed", 0)
    threads = _int_of(exp_table.get("threads", 1), "[experiment].threads", 1)
    if threads > MAX_WORK_THREADS:
        raise ConfigError(f"[experiment].threads must be <= {MAX_WORK_THREADS}")
    tag = exp_table.get("tag", "")
    if not isinstance(tag, str):
        raise ConfigError("[experiment].tag must be a string")
    output = config.get("output", {})
    if not isinstance(output, dict):
        raise ConfigError("[output] must be a table")
    _no_extra(output, {"csv", "metadata"}, "[output]")
    csv_name = output.get("csv", f"{kind}.csv")
    meta_name = output.get("metadata", None)
    for label, value in (("csv", csv_name), ("metadata", meta_name)):
        if value is None:
            continue
        if not isinstance(value, str) or not value:
            raise ConfigError(f"[output].{label} must be a non-empty string")
        if value.startswith("/") or ".." in value.split("/"):
            raise ConfigError(f"[output].{label} must be a plain relative path")
    if meta_name is None:
        stem = csv_name[:-4] if csv_name.endswith(".csv") else csv_name
        meta_name = stem + ".meta.json"
    params = config.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("[params] must be a table")
    normalized = EXPERIMENTS[kind].validate(dict(params))
    return {"kind": kind, "seed": seed, "threads": threads, "tag": tag,
            "csv": csv_name, "metadata": meta_name, "params": normalized}


def plan_experiment(parsed: dict) -> dict:
    exp = EXPERIMENTS[parsed["kind"]]
    plan = exp.plan(parsed["params"], parsed["seed"])
    return {
        "experiment": parsed["kind"],
        "seed": parsed["seed"],
        "threads": parsed["threads"],
        "csv": parsed["csv"],
        "metadata": parsed["metadata"],
        **plan,
    }


def execute_experiment(parsed: dict) -> tuple[list[dict], bool]:
    """Run all work items and return (rows, truncated).

    Results are assembled in item order whatever the thread count, so the
    output is scheduling-independent.  On interrupt, rows from completed
    items are kept and truncated=True is returned.
    """
    exp = EXPERIMENTS[parsed["kind"]]
    items = exp.items(parsed["params"], parsed["seed"])
    results: dict[int, list[dict]] = {}
    truncated = False
    threads = parsed["threads"]
    if threads <= 1:
        try:
            for i, item in enumerate(items):
                results[i] = item()
        except KeyboardInterrupt:
            truncated = True
    else:
        executor = ThreadPoolExecutor(max_workers=threads)
        try:
            futures = {executor.submit(item): i for i, item in enumerate(items)}
            pending = set(futures)
            while pending:
                done, pending = wait(pending, return_when=FIRST_COMPLETED)
                for fut in done:
                    results[futures[fut]] = fut.result()
            executor.shutdown()
        except KeyboardInterrupt:
            truncated = True
            executor.shutdown(wait=False, cancel_futures=True)
    rows: list[dict] = []
    for i in range(len(items)):
        if i in results:
            rows.extend(results[i])
        elif truncated:
            break
    tagged = []
    for row in (rows if truncated else exp.finalize(parsed["params"], rows)):
        tagged.append({"experiment": parsed["kind"], "tag": parsed["tag"], **row})
    return tagged, truncated
