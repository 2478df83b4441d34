from .base import PilotMeshError


class OverlayError(PilotMeshError):
    """Raised on overlay misuse, such as a lookup by an unregistered device."""
