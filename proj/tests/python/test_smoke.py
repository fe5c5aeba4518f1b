import solstab


def test_import():
    assert hasattr(solstab, "__doc__")
