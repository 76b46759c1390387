import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from signalgames import corpus


@pytest.fixture(scope="session")
def games():
    return {name: corpus.build_game(name) for name in corpus.GAME_BUILDERS}
