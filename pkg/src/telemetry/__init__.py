from .telemetry import Telemetry, NoisyLibraryFilter
