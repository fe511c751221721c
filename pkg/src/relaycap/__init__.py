"""Capacity bounds and quantize-map-forward analysis for Gaussian relay networks."""

__version__ = "0.1.0"

from .baselines import af_optimize, af_rate, cf_optimize, cf_rate_layered, df_rate, sweep
from .cuts import (GapCertificate, MinCutAnalysis, gap_certificate, min_cut_analysis,
                   qmf_achievable_general, qmf_achievable_layered, quantizer_params)
from .linalg import capacity_waterfilled, gaussian_cond_entropy, mi_gaussian_iid, waterfill
from .model import (Cut, Edge, RelayNetwork, diamond_network, enumerate_cuts, layering,
                    line_network, network_from_dict, network_to_dict, network_to_json,
                    parse_network)
from .sim import SimConfig, SimResult, estimate_error_rate, list_size_census, run_trial
from .unfold import (classify_cut, make_subset_sequence, make_unfolded_cut, steady_cut,
                     unfold, unfolded_cut_value, verify_loop_lemma, verify_trellis_lemma)

__all__ = [
    "__version__",
    "af_optimize", "af_rate", "cf_optimize", "cf_rate_layered", "df_rate", "sweep",
    "GapCertificate", "MinCutAnalysis", "gap_certificate", "min_cut_analysis",
    "qmf_achievable_general", "qmf_achievable_layered", "quantizer_params",
    "capacity_waterfilled", "gaussian_cond_entropy", "mi_gaussian_iid", "waterfill",
    "Cut", "Edge", "RelayNetwork", "diamond_network", "enumerate_cuts", "layering",
    "line_network", "network_from_dict", "network_to_dict", "network_to_json",
    "parse_network",
    "SimConfig", "SimResult", "estimate_error_rate", "list_size_census", "run_trial",
    "classify_cut", "make_subset_sequence", "make_unfolded_cut", "steady_cut",
    "unfold", "unfolded_cut_value", "verify_loop_lemma", "verify_trellis_lemma",
]
