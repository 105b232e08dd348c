APP_NAME = "knn-measure-lab"
APP_VERSION = "1.0.0"

# Bumped whenever result.json or reps.csv change shape.
SCHEMA_VERSION = "1.0"

# CLI exit codes
EXIT_OK = 0
EXIT_INVALID_SPEC = 2
EXIT_NUMERIC_FAILURE = 3

# Configuration keys
SETTINGS_FILE_ENV = "KNN_SETTINGS_FILE"
LOG_LEVEL = "LOG_LEVEL"
ENABLE_CONSOLE_LOGGING = "ENABLE_CONSOLE_LOGGING"
TRACE_EXPORTER = "TRACE_EXPORTER"
DEFAULT_WORKERS = "KNN_DEFAULT_WORKERS"
DEFAULT_NORM = "KNN_DEFAULT_NORM"
RESULTS_DIR = "KNN_RESULTS_DIR"
SERVICE_PORT = "KNN_SERVICE_PORT"
SERVICE_APIKEY = "KNN_SERVICE_APIKEY"

# Output file names
RESULT_FILE = "result.json"
REPS_FILE = "reps.csv"
REPORT_FILE = "report.md"
CALIBRATION_FILE = "calibration.json"
