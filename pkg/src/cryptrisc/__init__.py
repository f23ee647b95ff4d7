"""Executable model of a RISC-V core with scalar crypto instructions and operand masking."""

from cryptrisc.kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
