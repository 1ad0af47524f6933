from .dataset import CategoryEncoding, Dataset, VariableColumn

__all__ = ["CategoryEncoding", "Dataset", "VariableColumn"]
