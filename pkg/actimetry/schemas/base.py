from pydantic import BaseModel, ConfigDict


class FrozenModel(BaseModel):
    """Immutable schema; every report payload derives from it."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)
