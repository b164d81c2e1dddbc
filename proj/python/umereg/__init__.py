"""Closed-form rigid point-cloud registration with universal manifold embedding moments."""

from ._umereg import (
    ConfigError,
    DegenerateGeometry,
    Error,
    ParseError,
    apply_transform,
    chamfer,
    euler_xyz_deg,
    hausdorff,
    load_points,
    read_umef,
    register_icp,
    register_ume,
    rmse_rotation,
    rmse_translation,
    run_benchmark,
    save_xyz,
    transform_to_json,
    write_umef,
)

__all__ = [
    "ConfigError",
    "DegenerateGeometry",
    "Error",
    "ParseError",
    "apply_transform",
    "chamfer",
    "euler_xyz_deg",
    "hausdorff",
    "load_points",
    "read_umef",
    "register_icp",
    "register_ume",
    "rmse_rotation",
    "rmse_translation",
    "run_benchmark",
    "save_xyz",
    "transform_to_json",
    "write_umef",
]
