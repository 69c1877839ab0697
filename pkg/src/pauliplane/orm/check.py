"""Implementation of ORM classes associated with pauliplane.task."""
import datetime
from typing import Optional

from sqlalchemy import ForeignKey
from sqlalchemy.orm import Mapped, mapped_column, relationship

from .base import Base
from ..enums import CheckStatus


class CheckNodeRecord(Base):
    """ORM equivalent of pauliplane.task.CheckNode."""

    id: Mapped[int] = mapped_column(autoincrement=True, primary_key=True, init=False)
    """id overriden in order to be able to set the remote_side of the parent attribute"""

    function: Mapped[str] = mapped_column(default=None)
    start_time: Mapped[Optional[datetime.datetime]] = mapped_column(default=None)
    end_time: Mapped[Optional[datetime.datetime]] = mapped_column(default=None)
    status: Mapped[CheckStatus] = mapped_column(default=None)
    residual: Mapped[Optional[float]] = mapped_column(default=None)
    tolerance: Mapped[Optional[float]] = mapped_column(default=None)
    reason: Mapped[Optional[str]] = mapped_column(default=None)
    parent_id: Mapped[Optional[int]] = mapped_column(ForeignKey("CheckNodeRecord.id"), default=None)
    parent: Mapped["CheckNodeRecord"] = relationship(foreign_keys=[parent_id], init=False, remote_side=[id])
