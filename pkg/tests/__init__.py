"""Test suite for glm-optimal-scaling.

Test Organization:
- unit_*.py: Pure numerical tests (no I/O beyond tmp_path)
- integration_*.py: CLI round trips and the public datasets

Running Tests:
- pytest tests/              # Run all tests
- pytest -m unit            # Run tests marked with @pytest.mark.unit
- pytest -m integration     # Run tests marked with @pytest.mark.integration
"""
