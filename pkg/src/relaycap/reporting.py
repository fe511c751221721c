"""Report payloads and rendering.

Every analysis result is first flattened into a plain dict with a stable key
order, then rendered as json, csv, or text. Numbers are printed with 12
significant digits in every format so identical runs produce identical bytes.
"""

from __future__ import annotations

import json
import math
from typing import Iterable, Optional, Sequence

from .baselines import SweepTable
from .cuts import GapCertificate, LayeredAchievable, MinCutAnalysis
from .model import Cut, RelayNetwork
from .sim import CensusReport, SimConfig, SimResult
from .unfold import LoopCheck, TrellisCheck, UnfoldedNetwork

SWEEP_COLUMNS = ("a", "upper_bits", "qmf_lower_bits", "af_bits", "df_bits",
                 "cf_bits", "gap_qmf_bits", "gap_af_bits", "gap_df_bits")


def sig(x):
    """Round a float to 12 significant digits; pass everything else through."""
    if isinstance(x, bool) or not isinstance(x, float):
        return x
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return float(f"{x:.12g}")


def fmt(x) -> str:
    if isinstance(x, float):
        if math.isinf(x) or math.isnan(x):
            return str(sig(x))
        return f"{x:.12g}"
    if x is None:
        return ""
    return str(x)


def _round_tree(obj):
    if isinstance(obj, dict):
        return {k: _round_tree(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_tree(v) for v in obj]
    return sig(obj)


def render_json(payload) -> str:
    return json.dumps(_round_tree(payload), indent=2) + "\n"


def render_csv(columns: Sequence[str], rows: Iterable[dict]) -> str:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(fmt(row.get(c)) for c in columns))
    return "\n".join(lines) + "\n"


def _aligned(rows: Sequence[Sequence[str]]) -> str:
    if not rows:
        return ""
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    out = []
    for r in rows:
        cells = [r[i].ljust(widths[i]) if i == 0 else r[i].rjust(widths[i])
                 for i in range(len(r))]
        out.append("  ".join(cells).rstrip())
    return "\n".join(out) + "\n"


def cut_names(net: RelayNetwork, cut: Cut) -> list:
    return [net.names[i] for i in sorted(cut.source_side)]


def _per_cut(net: RelayNetwork, analysis: MinCutAnalysis) -> list:
    return [{"omega": cut_names(net, rep.cut),
             "mi_iid_bits": rep.mi_iid,
             "mi_quantized_bits": rep.mi_quantized,
             "cap_wf_bits": rep.cap_wf}
            for rep in analysis.reports]


def bound_payload(net: RelayNetwork, analysis: MinCutAnalysis) -> dict:
    return {
        "upper_bits": analysis.min_cap_wf,
        "min_cut_iid": {"omega": cut_names(net, analysis.argmin_mi_iid),
                        "value": analysis.min_mi_iid},
        "min_cut_quantized": {"omega": cut_names(net, analysis.argmin_mi_quantized),
                              "value": analysis.min_mi_quantized},
        "min_cut_waterfilled": {"omega": cut_names(net, analysis.argmin_cap_wf),
                                "value": analysis.min_cap_wf},
        "num_cuts": len(analysis.reports),
        "per_cut": _per_cut(net, analysis),
    }


def achievable_payload(net: RelayNetwork, general_bits: float,
                       layered: Optional[LayeredAchievable]) -> dict:
    payload = {
        "layered": layered is not None,
        "qmf_general_bits": general_bits,
        "qmf_layered_bits": layered.rate_bits if layered else None,
        "qmf_conservative_bits": layered.conservative_bits if layered else None,
    }
    payload["lower_bits"] = layered.rate_bits if layered else general_bits
    return payload


def certificate_payload(net: RelayNetwork, cert: GapCertificate) -> dict:
    return {
        "upper_bits": cert.upper_bits,
        "lower_bits": cert.lower_bits,
        "gap_bits": cert.gap_bits,
        "bound_bits": cert.bound_bits,
        "min_cut_iid": {"omega": cut_names(net, cert.analysis.argmin_mi_iid),
                        "value": cert.analysis.min_mi_iid},
        "per_cut": _per_cut(net, cert.analysis),
    }


def unfold_payload(unet: UnfoldedNetwork) -> dict:
    crossing = sum(1 for e in unet.edges if not e.lossless)
    return {
        "stages": unet.stages,
        "num_nodes": unet.num_nodes,
        "num_edges": len(unet.edges),
        "crossing_edges": crossing,
        "memory_edges": len(unet.edges) - crossing,
        "nodes": [unet.node_label(n, k)
                  for k in range(unet.stages)
                  for n in range(unet.base.num_nodes)],
        "edges": [{"from": unet.node_label(*e.tail),
                   "to": unet.node_label(*e.head),
                   "gain": [e.gain.real, e.gain.imag],
                   "lossless": e.lossless}
                  for e in unet.edges],
    }


def trellis_payload(net: RelayNetwork, check: TrellisCheck) -> dict:
    return {
        "stages": check.stages,
        "states": check.num_states,
        "cuts_checked": check.checked,
        "violations": len(check.violations),
        "holds": check.holds,
        "vacuous": check.vacuous,
        "factor": check.factor,
        "min_original_bits": check.min_original,
        "threshold_bits": check.threshold,
        "min_value_bits": check.min_value,
        "margin_bits": check.margin,
    }


def loop_payload(net: RelayNetwork, subsets, check: LoopCheck) -> dict:
    return {
        "length": len(subsets.subsets),
        "subsets": [[net.names[i] for i in sorted(s)] for s in subsets.subsets],
        "tilde": [[net.names[i] for i in sorted(s)] for s in check.tilde],
        "lhs_bits": check.lhs_bits,
        "rhs_bits": check.rhs_bits,
        "margin_bits": check.margin_bits,
        "counts_match": check.counts_match,
        "holds": check.holds,
    }


def sweep_payload(table: SweepTable) -> dict:
    return {"param": table.param,
            "schemes": list(table.schemes),
            "columns": list(SWEEP_COLUMNS),
            "rows": [dict(row) for row in table.rows]}


def simulate_payload(cfg: SimConfig, result: SimResult) -> dict:
    return {
        "trials": result.trials,
        "errors": result.errors,
        "error_rate": result.error_rate,
        "T": cfg.block_len,
        "rate_bits": cfg.rate_bits,
        "seed": cfg.seed,
    }


def census_payload(report: CensusReport) -> dict:
    return {
        "trials": report.trials,
        "T": report.block_len,
        "ok": report.ok,
        "per_node": [{"node": e.node,
                      "distinct": e.distinct,
                      "exponent_bits": e.exponent,
                      "theory_rate_bits": e.theory_rate_bits,
                      "cap_exponent_bits": e.cap_exponent,
                      "ok": e.ok}
                     for e in report.entries],
    }


def _kv_text(pairs) -> str:
    return _aligned([[k, fmt(v)] for k, v in pairs])


def render_text(kind: str, payload: dict) -> str:
    if kind in ("bound", "certificate"):
        head = [(k, payload[k]) for k in payload
                if k not in ("per_cut", "min_cut_iid", "min_cut_quantized",
                             "min_cut_waterfilled")]
        lines = _kv_text(head)
        if "min_cut_iid" in payload:
            mc = payload["min_cut_iid"]
            lines += _kv_text([("min_cut_iid",
                                f'{{{",".join(mc["omega"])}}} = {fmt(mc["value"])}')])
        rows = [["omega", "mi_iid_bits", "mi_quantized_bits", "cap_wf_bits"]]
        for c in payload["per_cut"]:
            rows.append(["{" + ",".join(c["omega"]) + "}",
                         fmt(c["mi_iid_bits"]), fmt(c["mi_quantized_bits"]),
                         fmt(c["cap_wf_bits"])])
        return lines + _aligned(rows)
    if kind == "verify-trellis":
        head = f'{payload["violations"]} violations / {payload["cuts_checked"]} cuts\n'
        return head + _kv_text([(k, v) for k, v in payload.items()
                                if k not in ("violations", "cuts_checked")])
    if kind == "sweep":
        rows = [list(SWEEP_COLUMNS)]
        for r in payload["rows"]:
            rows.append([fmt(r.get(c)) for c in SWEEP_COLUMNS])
        return _aligned(rows)
    if kind == "census":
        head = _kv_text([(k, payload[k]) for k in ("trials", "T", "ok")])
        rows = [["node", "distinct", "exponent_bits", "theory_rate_bits", "ok"]]
        for e in payload["per_node"]:
            rows.append([e["node"], fmt(e["distinct"]), fmt(e["exponent_bits"]),
                         fmt(e["theory_rate_bits"]), fmt(e["ok"])])
        return head + _aligned(rows)
    if kind == "unfold":
        head = [(k, payload[k]) for k in
                ("stages", "num_nodes", "num_edges", "crossing_edges", "memory_edges")]
        lines = _kv_text(head)
        rows = [["from", "to", "gain", "lossless"]]
        for e in payload["edges"]:
            rows.append([e["from"], e["to"],
                         fmt(complex(e["gain"][0], e["gain"][1]).real)
                         if e["gain"][1] == 0 else f'{e["gain"][0]}+{e["gain"][1]}j',
                         fmt(e["lossless"])])
        return lines + _aligned(rows)
    return _kv_text(payload.items())


def render(kind: str, payload: dict, format: str) -> str:
    if format == "json":
        return render_json(payload)
    if format == "csv":
        if kind == "sweep":
            return render_csv(SWEEP_COLUMNS, payload["rows"])
        if kind in ("bound", "certificate"):
            cols = ("omega", "mi_iid_bits", "mi_quantized_bits", "cap_wf_bits")
            rows = [{**c, "omega": "|".join(c["omega"])} for c in payload["per_cut"]]
            return render_csv(cols, rows)
        flat = {k: v for k, v in payload.items()
                if not isinstance(v, (dict, list))}
        return render_csv(tuple(flat), [flat])
    return render_text(kind, payload)
