"""Omnidirectional Bell criteria for multiqubit correlation tensors."""

__version__ = "0.1.0"

from .qcore import (Direction, DensityMatrix, Ket, LocalUnitary, apply_local_unitary,
                    build_ghz, conjugate_local, cyclic_unitary, ghz_noise_mixture,
                    ghz_with_noise, rotation_unitary)
from .tensorlab import (CorrelationTensor, LocalFrame, component, correlation_tensor,
                        restrict_to_plane, rotate)
from .maximize import best_plane, max_component
from .criteria import (check_all, check_full_sphere, check_plane, check_two_setting,
                       threshold)
from .sphereint import (inner_product_EE, lhv_correlation, project_response,
                        sphere_quadrature, verify_lhv_bound)
