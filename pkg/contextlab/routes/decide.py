"""
ContextLab Behavior Routes

Decide, validate and (de)consistify behaviors posted as JSON.
"""
import logging

from fastapi import APIRouter, HTTPException

from ..config import THEORIES
from ..core import validate_behavior
from ..deciders import get_criterion, get_decider
from ..errors import ContextlabError, FormatError
from ..models import BehaviorModel, behavior_from_model, behavior_to_json
from ..transforms import consistify, deconsistify

logger = logging.getLogger(__name__)
router = APIRouter(tags=["behaviors"])


def error_response(e: ContextlabError) -> HTTPException:
    """Every library error becomes a 422 carrying its JSON detail."""
    logger.warning(f"Request rejected: {e}")
    return HTTPException(status_code=422, detail=e.detail())


@router.get("/theories")
def list_theories():
    return THEORIES


@router.post("/decide/{theory}")
def decide(theory: str, behavior: BehaviorModel):
    """Verdict with witness or Farkas certificate."""
    if theory not in THEORIES:
        raise HTTPException(status_code=404, detail=f"Unknown theory: {theory}")
    try:
        b = behavior_from_model(behavior)
        return get_decider(theory)(b).to_json()
    except ContextlabError as e:
        raise error_response(e)


@router.post("/validate")
def validate(behavior: BehaviorModel):
    try:
        b = behavior_from_model(behavior, validate=False)
    except ContextlabError as e:
        raise error_response(e)
    problems = validate_behavior(b)
    return {"valid": not problems, "problems": problems}


@router.post("/consistify")
def consistify_behavior(behavior: BehaviorModel, criterion: str = "multimaximal"):
    try:
        b = behavior_from_model(behavior)
        return behavior_to_json(consistify(b, get_criterion(criterion)))
    except ContextlabError as e:
        raise error_response(e)


@router.post("/deconsistify")
def deconsistify_behavior(behavior: BehaviorModel):
    try:
        if behavior.provenance is None:
            raise FormatError("behavior has no provenance block")
        return behavior_to_json(deconsistify(behavior_from_model(behavior)))
    except ContextlabError as e:
        raise error_response(e)
