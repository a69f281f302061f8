"""Impedance models and anti-resonance analysis for multi-supply PDNs."""

from ._kernels import backend_name
from .analysis import (ANTI_RESONANCE, CLOSED_FORM, ORACLE, RESONANCE,
                       ComplianceReport, OracleComparison, Peak, PeakReport,
                       SweepGrid, SweepResult, TargetSpec, attach_q,
                       check_compliance, compare_with_oracle, default_grid,
                       detect_peaks, log_grid, param_sweep, q_estimate, sweep,
                       target_impedance)
from .config import PdnConfig, dump_config, parse_config, parse_si
from .errors import (BadRange, Disconnected, EvaluationSingular,
                     IdenticallyZeroDenominator, NoConvergence, NumericalError,
                     ParseError, PdnError, SingularSystem, TooFewPoints,
                     TooManyBranches, UnknownParam)
from .mna import (Netlist, node_voltages, oracle_impedance, oracle_sweep,
                  oracle_transfer_impedance)
from .pdn import (MAX_EXTRA_BRANCHES, CoefficientSet, PdnSystem, RlcBranch,
                  SymmetricThreeSupplyPdn, ThreeSupplyPdn, TwoSupplyPdn,
                  WyeLegs, add_parallel_decap, branch_rational, compact_rf,
                  delta_to_wye, root_scale_hint, set_branch_field,
                  symmetric_coefficients, symmetric_three_supply_rf,
                  symmetric_transcription_report, system_rf,
                  three_supply_closed_form, three_supply_rf, to_netlist,
                  two_supply_coefficients, two_supply_rf,
                  two_supply_transcription_report)
from .ratfun import (Polynomial, RationalFunction, RootSet, poly_add, poly_mul,
                     rf_add, rf_div, rf_eval, rf_eval_grid, rf_mul,
                     rf_parallel, rf_roots)

__version__ = "0.1.0"
