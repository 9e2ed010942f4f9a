"""Trajectory-clustering cluster-head election for wireless sensor networks."""
from ._accel import USE_NUMBA
from .clustering import (ClusterAssignment, RepresentativeSet, cluster_trajectories, initial_clusters, recluster,
                         representative_of)
from .config import SimConfig, load_config
from .energy import (RadioParams, FieldParams, aggregation_energy, analytic_cluster_energy, crossover_distance,
                     optimal_cluster_count, rx_energy, tx_energy)
from .report import RunResult, emit_plots, run_scenario, write_csv
from .simulation import (NetworkState, RoundMetrics, build_trajectories, deploy, elect_cluster_heads,
                         leach_baseline_elect, maybe_rotate_heads, run_round, run_simulation)
from .trajectory import (DissimilarityMatrix, Point2D, Trajectory, build_dissimilarity_matrix, one_way_distance,
                         point_to_trajectory_distance, trajectory_distance)

__version__ = "0.1.0"
