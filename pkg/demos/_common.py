from pathlib import Path

import matplotlib

matplotlib.use("Agg")

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)
