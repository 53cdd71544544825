"""OFDMA joint sensing/communication toolkit.

Library layout (one module per subsystem):

  model         shared domain types, steering vectors, index variance
  schemes       named index-distribution schemes and closed-form CRBs
  fisher        numerical Fisher-information CRB oracle
  partition     max-min-variance subcarrier partitioning
  synthesis     received-frame synthesis through the delay-Doppler channel
  compensation  data compensation and CSI extraction
  music         2-D MUSIC range/velocity estimation
  rates         inter-carrier interference and achievable rates
  scenario      configuration files and desk-scale defaults
  frameio       binary frame/CSI dump formats
  experiments   named figure-reproduction experiments
  cli           the ``isac-lab`` command line
"""

__version__ = "0.1.0"

from .errors import (AssignmentError, CapacityError, CompensationError,
                     ConfigError, DegeneracyError, IsacLabError, OverlapError)
from .model import (SPEED_OF_LIGHT, ChannelPath, DataGrid, ResourceAssignment,
                    SystemConfig, UeChannel, index_variance, random_qpsk_grid,
                    selection_matrix, steering_vector, uniform_beamformer)
from .schemes import (CrbInputs, ExtremalityReport, SchemeKind,
                      TABLE1_SINGLE_UE, TABLE2_GENERALIZED, crb_range,
                      crb_velocity, generate_scheme, verify_extremality)
from .fisher import (FisherProblem, build_manifold, crb_range_velocity,
                     fisher_crb, manifold_derivatives, projection_residual)
from .partition import (PartitionInstance, PartitionSolution, VarianceBound,
                        crb_gap, enumerate_partitions, exact_partition,
                        interleaved_partition, variance_bound,
                        variance_decomposition)
from .synthesis import (OfdmaFrameSet, add_awgn, freq_to_time, measure_re_snr,
                        synthesize_frames, time_to_freq)
from .compensation import (CompensationMatrix, CsiBlock, build_compensator,
                           build_compensators, cross_ue_leakage, extract_csi,
                           extract_csi_all)
from .music import (EstimateSet, MusicConfig, estimate, music_spectrum,
                    sample_covariance, signal_subspace)
from .rates import (IciMatrix, RateReport, achievable_rates, ici_matrix,
                    ici_power, sample_exact_symbol)
from .scenario import (Scenario, desk_channels, desk_config, load_scenario,
                       make_target_channel, save_scenario, scheme_assignments)
from .frameio import dump_csi, dump_frames, load_csi, load_frames
from .experiments import EXPERIMENT_NAMES, ExperimentSpec, ResultTable, run, validate
