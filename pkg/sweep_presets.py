"""
Sweep Presets for the HOPS simulator
Named parameter grids for the squeezing-function surfaces
"""
from typing import Dict, List, Any, Optional, Tuple
from enum import Enum

from config import FIG1A_SETTINGS, FIG1B_SETTINGS, POINT_SETTINGS, PRESET_ALIASES
from errors import InvalidConfigError


class SweepPreset(Enum):
    """Available sweep presets"""
    FIG1A = "fig1a"
    FIG1B = "fig1b"
    POINT = "point"


def resolve_preset(preset) -> SweepPreset:
    """Enum member for a preset, its value or an alias"""
    if isinstance(preset, SweepPreset):
        return preset
    return SweepPreset(PRESET_ALIASES.get(preset, preset))


def preset_names() -> List[str]:
    """Every name accepted on the command line, aliases last"""
    return [preset.value for preset in SweepPreset] + list(PRESET_ALIASES)


class SweepPresetConfig:
    """Configuration for a specific sweep preset"""

    def __init__(self, name: str, description: str, settings: Dict[str, Any], notes: Dict[str, Any]):
        self.name = name
        self.description = description
        self.ax_sq = settings['ax_sq']
        self.ph_mag = settings['ph_mag']
        self.kt_range = tuple(settings['kt_range'])
        self.delta_range = tuple(settings['delta_range'])
        self.notes = notes

    def get_description(self) -> str:
        """Get full description with grid"""
        kt_min, kt_max, kt_steps = self.kt_range
        d_min, d_max, d_steps = self.delta_range
        desc = f"{self.description}\n\n"
        desc += f"📈 |alpha_x|^2 = {self.ax_sq:g}, |p_h| = {self.ph_mag:g}"
        desc += f"\n⏱️ kt: [{kt_min:g}, {kt_max:g}] x {kt_steps}"
        desc += f"\n🌀 Delta_h: ({d_min:.4g}, {d_max:.4g}] x {d_steps}"

        if self.notes:
            desc += "\n\n📋 Notas:"
            for note, value in self.notes.items():
                desc += f"\n• {note}: {value}"

        return desc

    def to_settings(self) -> Dict[str, Any]:
        return {
            'ax_sq': self.ax_sq,
            'ph_mag': self.ph_mag,
            'kt_range': self.kt_range,
            'delta_range': self.delta_range,
        }


class PresetManager:
    """Manages the sweep presets"""

    def __init__(self):
        self.presets: Dict[SweepPreset, SweepPresetConfig] = {}
        self._init_presets()

    def _init_presets(self):
        """Initialize all presets"""
        self.presets[SweepPreset.FIG1A] = SweepPresetConfig(
            name="Intensidades iguales",
            description="Función Sq sobre (kt, Delta_h) para dos modos de igual intensidad.",
            settings=FIG1A_SETTINGS,
            notes={
                "Razón de intensidades |p_h|^2": "1",
                "|alpha_x|^2": "valor por defecto, se cambia con --ax-sq",
                "Alias": "equal",
            }
        )

        self.presets[SweepPreset.FIG1B] = SweepPresetConfig(
            name="Intensidades distintas",
            description="Función Sq sobre (kt, Delta_h) con el modo y veinticinco veces más intenso.",
            settings=FIG1B_SETTINGS,
            notes={
                "Razón de intensidades |p_h|^2": "25",
                "Fotones en el modo y": f"{FIG1B_SETTINGS['ax_sq'] * FIG1B_SETTINGS['ph_mag'] ** 2:g}",
                "Alias": "unequal",
            }
        )

        self.presets[SweepPreset.POINT] = SweepPresetConfig(
            name="Control puntual",
            description="Grilla de dos por dos que pasa por los valores de control en kt = 0.25.",
            settings=POINT_SETTINGS,
            notes={}
        )

    def get_preset(self, preset) -> Optional[SweepPresetConfig]:
        """Get configuration for a preset (enum, name or alias)"""
        try:
            return self.presets.get(resolve_preset(preset))
        except ValueError:
            return None

    def get_all_presets(self) -> Dict[SweepPreset, SweepPresetConfig]:
        """Get all available presets"""
        return self.presets.copy()

    def get_preset_list(self) -> List[Tuple[SweepPreset, str, str]]:
        """List of presets for the CLI help"""
        return [(preset, config.name, config.description) for preset, config in self.presets.items()]

    def apply_preset(self, preset, settings: Dict[str, Any]) -> Dict[str, Any]:
        """Return settings with the preset's grid filled in underneath"""
        config = self.get_preset(preset)
        if config is None:
            raise InvalidConfigError(f"unknown preset {preset!r}; choose from {preset_names()}")
        merged = config.to_settings()
        merged.update(settings)
        return merged
