"""mfwallet: a decentralized custodial-style wallet.

Private keys are never stored; they are derived on demand from
multi-factor authentication witnesses. The public parameters needed for
derivation live on a simulated trustless peer network, signed by the
wallet's own key and evicted under storage pressure by proof of value.
"""

__version__ = "0.1.0"
