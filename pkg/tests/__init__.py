__author__ = 'mathiashedstrom'
