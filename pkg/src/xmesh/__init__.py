"""Fixed-topology moving-mesh finite elements for two-phase Stefan problems.

The mesh keeps its connectivity for the whole run; nodes slide along edges
so the solid/liquid front always lies on mesh edges and nodes.
"""

from .analytic import (AxisymSolution, PlanarSolution, erf, exact_axisym, exact_planar, expint_Ei,
                       front_error, numerical_front_position, solve_phi_axisym, solve_phi_planar)
from .assembly import Assembler, DiracSink, DirichletBC, StepState
from .front import FrontState, ProjectionError, is_compatible, project_on_C, relax_in_C
from .mesh import (MeshError, MeshState, MeshTopology, MshParseError, generate_annulus_mesh,
                   generate_structured_mesh, read_msh)
from .physics import ICE_WATER, MaterialProperties, RegularizationParams
from .solver import SolverConfig, StefanProblem, StepReport, fixed_point_step, run_time_step

__version__ = "0.1.0"
