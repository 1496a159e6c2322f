"""
Meshcoop
~~~~~~~~

Cooperative game analysis of wireless mesh networks shared by multiple service providers.
Providers pool their nodes to route each other's flow sessions; meshcoop computes what every coalition earns
and how the grand coalition's payoff can be divided so that nobody has a reason to leave.
"""

__title__ = "meshcoop"
__license__ = "MIT"
__version__ = "1.0.0"

__path__ = __import__("pkgutil").extend_path(__path__, __name__)

from meshcoop.Errors import *
from meshcoop.Network import Params, Node, Link, FlowSession, NetworkSpec, Network, link_capacity, build_network, generate_random
from meshcoop.Coalition import Coalition, Routing, PayoffBreakdown, CharacteristicFunction
from meshcoop.Solver import builtin_solvers, create_solver
from meshcoop.Game import CoalitionGame, payoff_breakdown, check_superadditive, check_monotone
from meshcoop.Allocation import Allocation, CoreReport, marginal_contribution, shapley, dual_payoff, is_imputation, in_core
from meshcoop.Partition import CoalitionStructure, PayoffMatrix, enumerate_partitions, structure_table
from meshcoop.Analyzer import Analyzer
from meshcoop.Utils import Utils
