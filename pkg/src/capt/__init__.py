"""Per-word mispronunciation detection for pronunciation tutoring.

Pipeline: WAV ingestion -> MFCC features -> attention BiLSTM classifier,
plus the training/evaluation protocol and a small scoring service.
"""

__version__ = "0.1.0"
