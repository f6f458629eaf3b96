"""Differential characters of the Dirac monopole on triangulated spheres."""

__version__ = "0.1.0"

from .characters import (
    CechRep, CircleValue, DifferentialCharacter, cech_check, cech_rep, character,
    characteristic_class, evaluate, holonomy, relation_defect, string_defect, winding_number,
)
from .fields import (
    FormField, MonopoleConfig, QuadratureSpec, curvature_form, flux, integrate_2form,
    line_integral, solid_angle, string_potential,
)
from .homology import AbelianGroupDescriptor, SmithDecomposition, cohomology, homology, smith_normal_form
from .simplicial import (
    IntChain, SimplicialComplex, boundary, boundary_matrix, cap, fundamental_cycle,
    latitude_loop, shell_mesh, sphere_mesh,
)
