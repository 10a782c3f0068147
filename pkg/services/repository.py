from __future__ import annotations

from typing import TYPE_CHECKING

from utils.exceptions import NotFoundError
from utils.logging import get_logger

if TYPE_CHECKING:
    from services.gate_library import NamedGate

logger = get_logger(__name__)


class GateRegistry:
    """Singleton registry of named gates.

    register is called by load_standard_gates() or by callers adding their own gates.
    get / names are read by the commands.
    """

    _instance = None
    _initialized = False

    def __new__(cls):
        if not GateRegistry._instance:
            GateRegistry._instance = super().__new__(cls)
            GateRegistry._initialized = False
        return GateRegistry._instance

    def __init__(self) -> None:
        # Only initialize once so later calls share the registered gates
        if GateRegistry._initialized:
            return

        self.gates: dict[str, NamedGate] = {}
        GateRegistry._initialized = True

    def register(self, gate: NamedGate) -> None:
        if gate.name in self.gates:
            logger.debug(f"Replacing registered gate {gate.name}")
        self.gates[gate.name] = gate

    def get(self, name: str) -> NamedGate:
        """Look up a gate by exact name, then case-insensitively.

        Raises:
            NotFoundError: If no gate has that name
        """
        if name in self.gates:
            return self.gates[name]
        folded = {key.casefold(): key for key in self.gates}
        if name.casefold() in folded:
            return self.gates[folded[name.casefold()]]
        raise NotFoundError(f"Unknown gate {name!r}; known gates: {', '.join(self.names())}")

    def names(self) -> list[str]:
        """Registered gate names in registration order."""
        return list(self.gates)

    def __contains__(self, name: str) -> bool:
        return name in self.gates

    def __len__(self) -> int:
        return len(self.gates)

    @classmethod
    def reset_singleton(cls) -> None:
        """Reset singleton instance for testing. Use only in test fixtures."""
        cls._instance = None
        cls._initialized = False
