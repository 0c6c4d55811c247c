# backend/app/core/__init__.py

# 核心配置、日志与异常。
from .config import settings

__all__ = ["settings"]
