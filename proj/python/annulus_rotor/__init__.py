"""Rotating vorticity waves near Taylor-Couette flow in an annulus."""

from ._core import (
    AnnulusConfig,
    BranchPoint,
    ConfigError,
    DomainError,
    EigenSolution,
    KernelDiagnostics,
    Model,
    NumericError,
    RunConfig,
    circulation,
    lambda0,
    lambda0_direct,
    parse_config_text,
    u_tc,
)

__all__ = [
    "AnnulusConfig",
    "BranchPoint",
    "ConfigError",
    "DomainError",
    "EigenSolution",
    "KernelDiagnostics",
    "Model",
    "NumericError",
    "RunConfig",
    "circulation",
    "lambda0",
    "lambda0_direct",
    "parse_config_text",
    "u_tc",
]
