"""State documents shared by the tests and the scripts."""

from pathlib import Path

from entangle_sphere.documents import StateDocument

data_path = Path(__file__).parent

FILE_SINGLET = (data_path / "singlet.json").resolve()
FILE_PRODUCT_00 = (data_path / "product_00.json").resolve()
FILE_SCHMIDT_06_08 = (data_path / "schmidt_06_08.json").resolve()
FILE_CONE_06 = (data_path / "cone_06.json").resolve()
FILE_UNNORMALIZED = (data_path / "unnormalized.json").resolve()

SINGLET = StateDocument.load(FILE_SINGLET)
PRODUCT_00 = StateDocument.load(FILE_PRODUCT_00)
SCHMIDT_06_08 = StateDocument.load(FILE_SCHMIDT_06_08)
CONE_06 = StateDocument.load(FILE_CONE_06)
