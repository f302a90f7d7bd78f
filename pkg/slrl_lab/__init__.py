"""
SLRL Lab

A single-life reinforcement learning laboratory: pretrain agents in a source
environment, deploy them for one reset-free trial in a shifted target
environment, and compare fine-tuning, adversarial shaping and Q-weighted
adversarial shaping on steps-to-completion.
"""

__version__ = "0.1.0"
