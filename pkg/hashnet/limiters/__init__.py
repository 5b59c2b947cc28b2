from hashnet.limiters.limiter import Limiter

# NOTE: no import of system limiters
#
#   Would likely cause circular imports and prevents any system
#   specific modules from being imported
__all__ = ["Limiter"]
