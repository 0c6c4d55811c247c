# backend/app/services/__init__.py
# 服务层: 每个模块对应一块计算功能 (p-adic 运算、格模型、局部分析、全局扫描)。
