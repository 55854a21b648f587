from typing import List

from fastapi import APIRouter

from app.models.response import PresetInfo
from app.services.trialgen import PRESET_CATALOG

# Create router
router = APIRouter()


@router.get("/presets", response_model=List[PresetInfo])
async def list_presets():
    return PRESET_CATALOG
