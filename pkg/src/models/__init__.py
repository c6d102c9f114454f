"""Models package - spectrum, substance and label data structures."""

from .label import MIXTURE_CLASSES, SUBSTANCE_DISPLAY_NAMES, MixtureLabel, all_mixture_classes
from .spectrum import NoiseSpec, Peak, RamanSpectrum, SpectrumAxis, SubstanceProfile
from .substances import load_substance_library, profiles_from_dict

__all__ = [
    'MIXTURE_CLASSES',
    'SUBSTANCE_DISPLAY_NAMES',
    'MixtureLabel',
    'NoiseSpec',
    'Peak',
    'RamanSpectrum',
    'SpectrumAxis',
    'SubstanceProfile',
    'all_mixture_classes',
    'load_substance_library',
    'profiles_from_dict',
]
