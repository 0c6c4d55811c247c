# backend/app/core/config.py
import logging

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

# pydantic-settings 会自动读取 .env 文件 (依赖 python-dotenv)，
# 环境变量优先于 .env 中的值。

logger = logging.getLogger(__name__)


class Settings(BaseSettings):
    PROJECT_NAME: str = "padiq"
    DEBUG: bool = False # 调试模式开关

    # 日志级别 (日志写到 stderr，报告写到 stdout)
    LOG_LEVEL: str = "WARNING"

    # 扫描器的线程数；命令行 --threads 优先
    PADIQ_THREADS: int = Field(1, ge=1)

    # BOUNDED 判定的深度: e_max = t + PADIQ_EMAX_PADDING
    PADIQ_EMAX_PADDING: int = Field(4, ge=0)

    # theorem3 中 "表示某个奇数" 的搜索上界
    PADIQ_ODD_SEARCH_BOUND: int = Field(200, ge=1)

    # 行列式超过此值时拒绝分解
    PADIQ_MAX_DETERMINANT: int = 10**12

    # 随机性质测试 (verify-paper) 的规模
    PADIQ_RANK5_SAMPLES: int = Field(500, ge=0)
    PADIQ_RANK5_SPECTRUM_DEPTH: int = Field(6, ge=0)
    PADIQ_ORACLE_SAMPLES: int = Field(300, ge=0)
    PADIQ_ISOTROPY_SAMPLES: int = Field(500, ge=0)
    PADIQ_RANDOM_SEED: int = 20240501

    model_config = SettingsConfigDict(
        case_sensitive=True,
        env_file=".env",
        env_file_encoding='utf-8',
        extra='ignore'
    )


settings = Settings()


def log_loaded_settings() -> None:
    """DEBUG 模式下把加载到的配置写入日志。"""
    if not settings.DEBUG:
        return
    logger.debug("Loaded application settings:")
    for key, value in settings.model_dump().items():
        logger.debug(f"  {key}: {value}")
