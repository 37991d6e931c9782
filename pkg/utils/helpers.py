from typing import Any, Dict, Iterable, List, Union


def parse_n_list(value: Union[str, Iterable[int]]) -> List[int]:
    """
    Parse a list of division counts

    Args:
        value: '16,32,64', '16 32 64' or an iterable of integers

    Returns:
        List of integers in the given order
    """
    if isinstance(value, str):
        tokens = value.replace(',', ' ').split()
    else:
        tokens = list(value)
    if not tokens:
        raise ValueError("Empty list of N values")

    result = []
    for token in tokens:
        try:
            number = float(token)
        except (TypeError, ValueError):
            raise ValueError(f"Invalid N value: {token!r}") from None
        if not number.is_integer():
            raise ValueError(f"N must be an integer, got {token!r}")
        result.append(int(number))
    return result


def format_failure(error: Exception, stage: str = None) -> Dict[str, Any]:
    """
    Format a failure for the console report

    Args:
        error: Exception raised by a run
        stage: Optional stage name ('config', 'solve', ...)

    Returns:
        Formatted error dictionary
    """
    failure = {
        'success': False,
        'error': str(error),
        'type': type(error).__name__,
        'message': 'Experiment failed',
    }
    if stage:
        failure['stage'] = stage
    n = getattr(error, 'n', None)
    if n is not None:
        failure['n'] = n
    return failure
