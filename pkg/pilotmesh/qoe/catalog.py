from enum import IntEnum


class ParameterId(IntEnum):
    """User-satisfaction parameters of a D2D file-sharing application."""

    INTERNET_FREE_ACCESS = 1
    CHUNK_ACCESS_TIME = 2
    ENERGY_CONSUMPTION = 3
    RANK_SEARCH = 4
    KEYWORD_SEARCH = 5
    TARGET_HOP_DISTANCE = 6
    CONNECT_TIME = 7
    PILOT_HOP_DISTANCE = 8
    JOIN_TIME = 9

    @property
    def label(self) -> str:
        return PARAMETER_NAMES[self]


PARAMETER_NAMES: dict[ParameterId, str] = {
    ParameterId.INTERNET_FREE_ACCESS: "internet-free accesses",
    ParameterId.CHUNK_ACCESS_TIME: "chunk access time",
    ParameterId.ENERGY_CONSUMPTION: "energy consumption",
    ParameterId.RANK_SEARCH: "search rank file",
    ParameterId.KEYWORD_SEARCH: "search file with keyword",
    ParameterId.TARGET_HOP_DISTANCE: "hop distance to target",
    ParameterId.CONNECT_TIME: "D2D connect time",
    ParameterId.PILOT_HOP_DISTANCE: "hop distance to pilot",
    ParameterId.JOIN_TIME: "join time",
}

DEFAULT_PREFERENCE: tuple[ParameterId, ...] = tuple(ParameterId)
