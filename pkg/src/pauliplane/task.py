"""Implementation of check trees using anytree."""

# used for delayed evaluation of typing until python 3.11 becomes mainstream
from __future__ import annotations

import datetime
import inspect
import json
import logging
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Tuple

import anytree
import sqlalchemy.orm
import tqdm

from .enums import CheckStatus
from .failures import ToolkitFailure
from .orm.base import RunMetaData
from .orm.check import CheckNodeRecord

logger = logging.getLogger(__name__)


class CheckCall:
    """
    A suite function together with the keyword arguments it was called with.

    :ivar function: The function that was called
    :ivar kwargs: Dictionary holding the keyword arguments of the function
    """

    def __init__(self, function: Optional[Callable] = None, kwargs: Optional[Dict] = None):
        if function is None:
            def no_operation(): return None
            function = no_operation
        self.function: Callable = function
        self.kwargs: Dict[str, Any] = dict(kwargs) if kwargs else dict()

    def execute(self) -> Any:
        return self.function(**self.kwargs)

    def __str__(self) -> str:
        return "%s(%s)" % (self.function.__name__, ", ".join(sorted(self.kwargs)))

    def __eq__(self, other):
        return isinstance(other, CheckCall) and other.function.__name__ == self.function.__name__ \
            and other.kwargs == self.kwargs

    def to_json(self) -> Dict:
        """Create a dictionary that can be json serialized."""
        return {"function": self.function.__name__, "kwargs": self.kwargs_to_json()}

    def kwargs_to_json(self) -> Dict:
        """Try to parse the keyword arguments to json. Objects with a to_json method and enums are converted, plain
        values are kept if they survive a json round trip, everything else is skipped."""
        result = dict()
        for keyword, argument in self.kwargs.items():
            to_json_method = getattr(argument, 'to_json', None)

            if to_json_method:
                result[keyword] = to_json_method()
            elif isinstance(argument, Enum):
                result[keyword] = argument.value
            else:
                try:
                    result[keyword] = json.loads(json.dumps(argument))
                except (TypeError, OverflowError, ValueError):
                    logger.warning("Object of type %s cannot be JSON serialized. Skipping..." % type(argument))

        return result


def assess(result: Any) -> Tuple[Optional[bool], Optional[float], Optional[float]]:
    """
    Condense the return value of a suite into (passed, worst residual, tolerance of the worst check).

    Reports are recognized by their ``passed`` and ``max_residual`` attributes; lists, tuples and dict values are
    searched recursively. Anything else yields (None, None, None).
    """
    if hasattr(result, "passed") and hasattr(result, "max_residual"):
        return bool(result.passed), float(result.max_residual), getattr(result, "tolerance", None)
    if isinstance(result, dict):
        result = list(result.values())
    if not isinstance(result, (list, tuple)):
        return None, None, None

    passed, residual, tolerance = None, None, None
    for verdict, value, limit in (assess(item) for item in result):
        if verdict is None:
            continue
        passed = verdict if passed is None else passed and verdict
        if residual is None or (value is not None and value > residual):
            residual, tolerance = value, limit
    return passed, residual, tolerance


class CheckNode(anytree.NodeMixin):
    """CheckNode represents one suite function that was called during a verification run.

    :ivar call: The function that was executed as CheckCall object.
    :ivar status: The status of the node from the CheckStatus enum.
    :ivar start_time: The starting time of the function, optional
    :ivar end_time: The ending time of the function, optional
    :ivar residual: The worst residual the function reported, optional
    :ivar tolerance: The tolerance the worst residual was compared with, optional
    :ivar reason: The failure that stopped the function, optional
    """

    def __init__(self, call: Optional[CheckCall] = None, parent: Optional[CheckNode] = None,
                 children: Optional[List[CheckNode]] = None, reason: Optional[Exception] = None):
        super().__init__()
        self.call: CheckCall = call if call is not None else CheckCall()
        self.status: CheckStatus = CheckStatus.CREATED
        self.start_time: Optional[datetime.datetime] = None
        self.end_time: Optional[datetime.datetime] = None
        self.residual: Optional[float] = None
        self.tolerance: Optional[float] = None
        self.parent = parent
        self.reason: Optional[Exception] = reason

        if children:
            self.children = children

    @property
    def name(self):
        return str(self.call)

    @property
    def passed(self) -> bool:
        """True if neither this node nor any descendant failed."""
        return all(node.status != CheckStatus.FAILED for node in anytree.PreOrderIter(self))

    def to_json(self, timestamps: bool = True) -> Dict:
        """
        Serialize this subtree.

        :param timestamps: Include start and end times. Reports that must be byte-identical across reruns leave
            them out.
        """
        result = {"call": self.call.to_json(),
                  "status": self.status.name,
                  "residual": self.residual,
                  "tolerance": self.tolerance,
                  "reason": str(self.reason) if self.reason else None,
                  "children": [child.to_json(timestamps) for child in self.children]}
        if timestamps:
            result["start_time"] = self.start_time.isoformat() if self.start_time else None
            result["end_time"] = self.end_time.isoformat() if self.end_time else None
        return result

    def __str__(self):
        return "%s [%s]" % (self.call, self.status.name)

    def __repr__(self):
        return str(self.call)

    def __len__(self):
        """Get the number of nodes that are in this subtree."""
        return 1 + sum([len(child) for child in self.children])

    def to_sql(self) -> CheckNodeRecord:
        """Convert this object to the corresponding object in the pauliplane.orm package."""
        reason = type(self.reason).__name__ if self.reason else None
        return CheckNodeRecord(self.call.function.__name__, self.start_time, self.end_time, self.status,
                               self.residual, self.tolerance, reason)

    def insert(self, session: sqlalchemy.orm.Session, recursive: bool = True,
               parent_id: Optional[int] = None, use_progress_bar: bool = True,
               progress_bar: Optional[tqdm.tqdm] = None) -> CheckNodeRecord:
        """
        Insert this node into the database.

        :param session: The current session with the database.
        :param recursive: Rather if the entire tree should be inserted or just this node, defaults to True
        :param parent_id: The primary key of the parent node, defaults to None
        :param use_progress_bar: Rather to use a progressbar or not
        :param progress_bar: The progressbar to update. If a progress bar is desired and this is None, a new one will be
            created.

        :return: The ORM object that got inserted
        """
        if use_progress_bar and not progress_bar:
            progress_bar = tqdm.tqdm(desc="Inserting CheckTree into database", leave=True, position=0,
                                     total=len(self) if recursive else 1)

        node = self.to_sql()
        node.run_metadata_id = RunMetaData().insert(session).id
        node.parent_id = parent_id

        # add the node to database to retrieve the new id
        session.add(node)
        session.commit()

        if progress_bar:
            progress_bar.update()

        if recursive:
            for child in self.children:
                child.insert(session, parent_id=node.id, use_progress_bar=use_progress_bar, progress_bar=progress_bar)

        return node


check_tree: Optional[CheckNode] = None
"""Current CheckNode"""


def reset_tree() -> None:
    """
    Reset the current check tree to an empty root node.
    """
    global check_tree
    check_tree = CheckNode()
    check_tree.start_time = datetime.datetime.now()
    check_tree.status = CheckStatus.RUNNING


reset_tree()


def with_check(fun: Callable) -> Callable:
    """Decorator that records the function name, arguments, residuals and execution metadata in the check tree.

    A call whose result contains a failing report is marked FAILED but returns normally. A ToolkitFailure marks the
    node FAILED and is re-raised.

    :param fun: The function to record the data from.
    """

    def handle_check(*args, **kwargs):
        global check_tree

        call = CheckCall(fun, inspect.getcallargs(fun, *args, **kwargs))
        check_tree = CheckNode(call, parent=check_tree)

        try:
            check_tree.status = CheckStatus.RUNNING
            check_tree.start_time = datetime.datetime.now()
            result = check_tree.call.execute()

            passed, check_tree.residual, check_tree.tolerance = assess(result)
            if passed is False:
                logger.warning("Check %s failed with residual %.3e (tolerance %.1e)"
                               % (check_tree.call, check_tree.residual, check_tree.tolerance or float("nan")))
                check_tree.status = CheckStatus.FAILED
            else:
                check_tree.status = CheckStatus.PASSED

        except ToolkitFailure as e:
            logger.exception("Check execution failed at %s. Reason %s" % (str(check_tree.call), e))
            check_tree.reason = e
            check_tree.status = CheckStatus.FAILED
            raise e
        finally:
            check_tree.end_time = datetime.datetime.now()
            check_tree = check_tree.parent
        return result

    handle_check.__name__ = fun.__name__
    handle_check.__doc__ = fun.__doc__
    return handle_check
