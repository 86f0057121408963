"""Corpus runner: provers, translators, and checkers over family instances.

Every proof that enters a report is re-checked first; a checker rejection
is raised as a defect rather than recorded.  Prover failures (bounds hit,
no proof) are recorded and the run continues.  Report content other than
the ``timing`` key is deterministic for a fixed corpus and configuration.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

from .bridge import cm_to_resolution, resolution_to_cm
from .factorize import factorization_fixpoint, size_report
from .matrix import check_proof, clausify
from .families import FamilySpec, gen_family
from .resolution import check_resolution_proof, saturate
from .search import SearchConfig, minimal_proof, prove
from dataclasses import replace


@dataclass
class RunReport:
    instances: list[dict] = field(default_factory=list)

    def to_json_lines(self, with_timing: bool = True) -> str:
        rows = self.instances if with_timing else [
            {k: v for k, v in row.items() if k != "timing"} for row in self.instances
        ]
        return "\n".join(json.dumps(row, sort_keys=False) for row in rows)


def _checked_cm(proof, path_cap):
    verdict = check_proof(proof, path_cap)
    if not verdict:
        raise RuntimeError(f"reported connection proof failed its checker: {verdict.reason}")
    return proof


def _checked_res(rp):
    verdict = check_resolution_proof(rp)
    if not verdict:
        raise RuntimeError(f"reported resolution proof failed its checker: {verdict.reason}")
    return rp


def run_instance(spec: FamilySpec, cfg: SearchConfig, saturate_budget: int = 5000) -> dict:
    """Run both prover modes, the resolution prover, and both translations."""
    t0 = time.perf_counter()
    formula = gen_family(spec)
    m = clausify(formula)
    row: dict = {
        "family": spec.name,
        "n": spec.n,
        "clauses": len(m.clauses),
    }
    timing: dict = {}

    t = time.perf_counter()
    off = prove(m, replace(cfg, factorization=False))
    timing["prove_off_ms"] = round((time.perf_counter() - t) * 1000, 1)
    if off:
        _checked_cm(off.proof, cfg.path_cap)
        row["prove_off"] = {
            "status": "proved",
            "connections": off.proof.connection_count(),
            "total_multiplicity": off.proof.total_multiplicity(),
            "nodes_expanded": off.stats["nodes_expanded"],
        }
    else:
        row["prove_off"] = {"status": off.failure}

    t = time.perf_counter()
    on = prove(m, replace(cfg, factorization=True))
    timing["prove_on_ms"] = round((time.perf_counter() - t) * 1000, 1)
    shared = None
    if on:
        shared = factorization_fixpoint(on.proof)
        _checked_cm(shared, cfg.path_cap)
        sizes = size_report(shared)
        row["prove_on"] = {
            "status": "proved",
            "connections": shared.connection_count(),
            "total_multiplicity": shared.total_multiplicity(),
            "tree_nodes": sizes.tree_nodes,
            "dag_nodes": sizes.dag_nodes,
            "nodes_expanded": on.stats["nodes_expanded"],
        }
    else:
        row["prove_on"] = {"status": on.failure}

    t = time.perf_counter()
    sat = saturate(m, budget=saturate_budget)
    timing["saturate_ms"] = round((time.perf_counter() - t) * 1000, 1)
    if sat:
        _checked_res(sat.proof)
        row["saturate"] = {"status": "refuted", "steps": sat.proof.step_count()}
    else:
        row["saturate"] = {"status": sat.verdict}

    if shared is not None:
        t = time.perf_counter()
        rp = _checked_res(cm_to_resolution(shared))
        timing["cm_to_resolution_ms"] = round((time.perf_counter() - t) * 1000, 1)
        row["cm_to_resolution"] = {
            "steps": rp.step_count(),
            "ratio": round(rp.step_count() / max(shared.connection_count(), 1), 4),
        }
    if sat:
        t = time.perf_counter()
        cp = _checked_cm(resolution_to_cm(sat.proof), cfg.path_cap)
        timing["resolution_to_cm_ms"] = round((time.perf_counter() - t) * 1000, 1)
        row["resolution_to_cm"] = {
            "connections": cp.connection_count(),
            "total_multiplicity": cp.total_multiplicity(),
            "ratio": round(cp.connection_count() / max(sat.proof.step_count(), 1), 4),
        }

    timing["total_ms"] = round((time.perf_counter() - t0) * 1000, 1)
    row["timing"] = timing
    return row


def run_compare(specs, cfg: SearchConfig = SearchConfig(), saturate_budget: int = 5000) -> RunReport:
    report = RunReport()
    for spec in specs:
        report.instances.append(run_instance(spec, cfg, saturate_budget))
    return report


def oracle_cross_check(spec: FamilySpec, bounds: SearchConfig) -> dict:
    """Exhaustive-minimum vs search sizes on a small instance."""
    m = clausify(gen_family(spec))
    row: dict = {"family": spec.name, "n": spec.n}
    mp = minimal_proof(m, bounds)
    row["minimal"] = mp.proof.connection_count() if mp else mp.failure
    mt = minimal_proof(m, bounds, tree_shaped=True)
    row["minimal_tree"] = mt.proof.connection_count() if mt else mt.failure
    return row
