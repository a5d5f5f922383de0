from .core import (
    EdgeAdjacency,
    PartMesh,
    Topology,
    build_mesh,
    dihedral_angles,
    edge_lengths,
    face_normals,
    hinge_angles,
    signed_volume,
)
from .obj import read_obj, write_obj
from .template import level_for_edges, subdivided_cube, template_topology
from .transforms import (
    RigidTransform,
    apply_rigid,
    matrix_to_quaternion,
    quaternion_to_matrix,
    random_quaternion,
    random_rotation,
    scale_mesh,
)
