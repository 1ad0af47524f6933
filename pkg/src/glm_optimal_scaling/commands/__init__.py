from . import cv, fit, plotdata, predict

__all__ = ["cv", "fit", "plotdata", "predict"]
