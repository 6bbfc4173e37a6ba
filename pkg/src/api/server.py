"""FastAPI server for Bol-Moufang Lab."""

from fastapi import FastAPI, HTTPException, Depends
from pydantic import BaseModel, Field, field_validator
from typing import List, Optional
from functools import lru_cache
import logging

import uvicorn

from src.core.catalog import UnknownLabel, catalog_records, lookup, parastrophe_identity, parastrophe_partner, resolve_identity
from src.core.config import AppConfig, ConfigManager
from src.core.evaluator import classify, satisfies
from src.core.quasigroup import QuasigroupError, UnitProfile, validate
from src.core.search import OrderTooLarge, Predicate, SearchQuery, SearchResult, find
from src.core.terms import IdentityError, format_identity, identity_type

logger = logging.getLogger(__name__)

app = FastAPI(title="Bol-Moufang Lab")


@lru_cache(maxsize=1)
def get_config() -> AppConfig:
    """Application configuration, loaded once."""
    return ConfigManager(setup_logging=False).config


class TableRequest(BaseModel):
    table: List[List[int]] = Field(..., min_length=1, description="Cayley table rows over 0..n-1")


class CheckRequest(TableRequest):
    identity: str = Field(..., min_length=1, description="Catalog label or inline identity")


class AnalyzeRequest(BaseModel):
    identity: str = Field(..., min_length=1)

    @field_validator("identity")
    @classmethod
    def strip_identity(cls, v: str) -> str:
        if not v.strip():
            raise ValueError("Identity cannot be empty")
        return v.strip()


class SearchRequest(BaseModel):
    identity: Optional[str] = None
    predicate: str = Field(default="always")
    min_order: int = Field(default=1, ge=1)
    max_order: int = Field(default=4, ge=1)
    budget: Optional[int] = Field(default=None, gt=0)


def _analysis(label: Optional[str], identity) -> dict:
    mirrored = parastrophe_identity(identity)
    return {
        "label": label,
        "identity": format_identity(identity),
        "type": identity_type(identity).model_dump(),
        "parastrophe": {"label": mirrored.label, "identity": format_identity(mirrored)},
    }


def _table(rows: List[List[int]]):
    try:
        return validate(rows)
    except QuasigroupError as e:
        raise HTTPException(status_code=422, detail=str(e))


def _identity(spec: str):
    try:
        return resolve_identity(spec)
    except UnknownLabel as e:
        raise HTTPException(status_code=404, detail=str(e))
    except IdentityError as e:
        raise HTTPException(status_code=422, detail=str(e))


@app.get("/health")
async def health_check():
    """Health check endpoint."""
    return {"status": "healthy"}


@app.get("/identities")
async def list_identities():
    """F1-F60 with abbreviations and types."""
    return catalog_records()


@app.get("/identities/{label}")
async def get_identity(label: str):
    """One catalog entry with its type and parastrophic partner."""
    try:
        entry = lookup(label)
    except UnknownLabel as e:
        raise HTTPException(status_code=404, detail=str(e))
    result = _analysis(entry.label, entry.identity)
    result["abbrev"] = entry.abbrev
    result["printed_partner"] = parastrophe_partner(entry.label)
    return result


@app.post("/identities/analyze")
async def analyze_identity(request: AnalyzeRequest):
    """Canonical text, type and (12)-parastrophe of an inline identity."""
    identity = _identity(request.identity)
    return _analysis(identity.label, identity)


@app.post("/check")
async def check_identity(request: CheckRequest):
    """Check an identity on a table."""
    table = _table(request.table)
    identity = _identity(request.identity)
    report = satisfies(table, identity)
    logger.info(f"Checked {identity.label or format_identity(identity)} on order {table.order}: {report.holds}")
    return {"identity": identity.label or format_identity(identity), "order": table.order, **report.model_dump()}


@app.post("/units", response_model=UnitProfile)
async def table_units(request: TableRequest):
    """Units, idempotents, loop and group flags of a table."""
    return classify(_table(request.table))


@app.post("/search", response_model=SearchResult)
def run_search(request: SearchRequest, config: AppConfig = Depends(get_config)):
    """Model-finder search; budget and order are capped by the configuration."""
    settings = config.search
    budget = min(request.budget or settings.budget, settings.budget)
    try:
        query = SearchQuery(
            identity=request.identity,
            predicate=request.predicate,
            min_order=request.min_order,
            max_order=request.max_order,
            budget=budget,
        )
        if query.identity is not None:
            query.resolve()
        cap = min(settings.max_order, config.server.max_search_order)
        result = find(query, incremental=settings.incremental, cap=cap)
    except UnknownLabel as e:
        raise HTTPException(status_code=404, detail=str(e))
    except (IdentityError, OrderTooLarge, ValueError) as e:
        raise HTTPException(status_code=422, detail=str(e))

    if result.budget_exhausted and result.witness is None:
        raise HTTPException(status_code=409, detail=f"Budget of {budget} node expansions exhausted")
    return result


def main(host: Optional[str] = None, port: Optional[int] = None, config: Optional[AppConfig] = None):
    """Serve the API on the configured host and port."""
    config = config or ConfigManager().config
    host = host or config.server.host
    port = port or config.server.port
    logger.info(f"Starting API server on {host}:{port}")
    server_config = uvicorn.Config(
        app,
        host=host,
        port=port,
        log_level=config.log_level,
        access_log=True,
        workers=1
    )
    uvicorn.Server(server_config).run()


if __name__ == "__main__":
    main()
