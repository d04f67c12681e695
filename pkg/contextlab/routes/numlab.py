"""
ContextLab Number Lab Routes
"""
import logging

from fastapi import APIRouter, HTTPException, Query

from ..errors import ContextlabError
from ..numlab import numlab_report
from .decide import error_response

logger = logging.getLogger(__name__)
router = APIRouter(prefix="/numlab", tags=["numlab"])

MAX_SERVED_NMAX = 10 ** 5


@router.get("")
def numlab(nmax: int = Query(100, ge=2, le=MAX_SERVED_NMAX)):
    try:
        return numlab_report(nmax)
    except ContextlabError as e:
        raise error_response(e)
