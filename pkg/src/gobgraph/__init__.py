"""Threshold random graphs driven by uniform (and radially reweighted)
laws on generalized Orlicz balls: samplers, graph statistics, moment and
correlation estimators, and Monte Carlo threshold scans."""

from .edges import edge_count, edge_index, edge_pairs
from .estimators import (MomentEstimate, NcTestReport, estimate_moments,
                         marginal_bound_check, nc_test, wilson_interval)
from .experiments import (Crossing, ScanConfig, ScanResult, ScanRow,
                          connectivity_scan, er_connectivity_oracle, giant_scan,
                          resolve_grid, run_scan, threshold_locator)
from .graph import (ComponentStats, ThresholdGraph, build_graph, components,
                    components_bfs, small_component_mass)
from .orlicz import (Cap, ExponentialDecay, GobSpec, Indicator, Linear,
                     PiecewiseLinearConvex, Power, PowerDecay, chord,
                     eval_component, inverse_at_one, m_bound, membership)
from .rng import replicate_stream, substream
from .samplers import (SamplerConfig, ValidationReport, exact_twin,
                       hit_and_run, ks_critical, make_sampler, sample_cube,
                       sample_lq_orthant, sample_shared_scale, sample_simplex,
                       start_point, validate_sampler)

__version__ = "0.1.0"
