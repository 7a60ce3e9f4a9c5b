"""Exact toolkit for the p-adic triple-product Eisenstein family.

Subpackages and modules:

* ``arith_core``    p-adic numbers, cyclotomic rings, Iwasawa power series
* ``siegel``        local Siegel series polynomials F_{B,l}
* ``family``        Fourier coefficients of the four-variable family
* ``archimedean``   symbolic archimedean coefficient polynomials and constants
* ``local_factors`` local L, gamma, epsilon factors, E_p, elliptic-curve tools
* ``cli``           command-line front end
"""

__version__ = "0.1.0"
