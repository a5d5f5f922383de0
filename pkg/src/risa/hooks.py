import inspect
from collections import defaultdict
from typing import Any, Callable, DefaultDict, Dict, List, Optional, Union, cast

import attr


@attr.s(slots=True)  # pragma: no mutate
class HookContext:
    """Passed as the first argument to every hook; ``epoch`` is set for hooks fired by the training loop."""

    epoch: Optional[int] = attr.ib(default=None)  # pragma: no mutate


@attr.s(slots=True)  # pragma: no mutate
class HookDispatcher:
    """Registry of user functions called at fixed points of training and of the CLI.

    Hook names and signatures come from specs declared with ``register_spec``.
    """

    _hooks: DefaultDict[str, List[Callable]] = attr.ib(factory=lambda: defaultdict(list))  # pragma: no mutate
    _specs: Dict[str, inspect.Signature] = {}  # pragma: no mutate

    def register(self, hook: Union[str, Callable]) -> Callable:
        """Register a hook function, usable as a decorator.

        The hook name is the function name:

            @risa.hooks.register
            def after_epoch(context, record):
                ...

        or is given explicitly:

            @risa.hooks.register("after_epoch")
            def log_total(context, record):
                ...
        """
        if isinstance(hook, str):

            def decorator(func: Callable) -> Callable:
                hook_name = cast(str, hook)
                return self.register_hook_with_name(hook_name, func)

            return decorator
        return self.register_hook_with_name(hook.__name__, hook)

    def register_hook_with_name(self, name: str, hook: Callable) -> Callable:
        self._validate_hook(name, hook)
        self._hooks[name].append(hook)
        return hook

    @classmethod
    def register_spec(cls, spec: Callable) -> Callable:
        """Declare a hook point; registered hooks must take as many arguments as ``spec``."""
        cls._specs[spec.__name__] = inspect.signature(spec)
        return spec

    def _validate_hook(self, name: str, hook: Callable) -> None:
        spec = self._specs.get(name)
        if spec is None:
            raise TypeError(f"There is no hook with name '{name}'")
        signature = inspect.signature(hook)
        if len(signature.parameters) != len(spec.parameters):
            raise TypeError(
                f"Hook '{name}' takes {len(spec.parameters)} arguments but {len(signature.parameters)} is defined"
            )

    def get_all_by_name(self, name: str) -> List[Callable]:
        return self._hooks.get(name, [])

    def dispatch(self, name: str, context: HookContext, *args: Any, **kwargs: Any) -> None:
        """Call the hooks registered for ``name`` in registration order."""
        for hook in self.get_all_by_name(name):
            hook(context, *args, **kwargs)

    def unregister(self, hook: Callable) -> None:
        for hooks in self._hooks.values():
            hooks[:] = [item for item in hooks if item is not hook]

    def unregister_all(self) -> None:
        self._hooks = defaultdict(list)


@HookDispatcher.register_spec
def after_epoch(context: HookContext, record: Any) -> None:
    """Called by the training runner after every epoch with the epoch's ``LossRecord``."""


GLOBAL_HOOK_DISPATCHER = HookDispatcher()
dispatch = GLOBAL_HOOK_DISPATCHER.dispatch
get_all_by_name = GLOBAL_HOOK_DISPATCHER.get_all_by_name
register = GLOBAL_HOOK_DISPATCHER.register
unregister = GLOBAL_HOOK_DISPATCHER.unregister
unregister_all = GLOBAL_HOOK_DISPATCHER.unregister_all
