# 命令行层: 参数解析、调用服务层、渲染报告。
