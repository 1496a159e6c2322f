from .Utils import *
