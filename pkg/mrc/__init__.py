"""
层次局部（HL）与数据局部（HDL）最大可恢复码。

本包负责：
1. layout：参数推导出的分组、可容许 E 与擦除模式的枚举、距离公式。
2. construct：显式构造校验矩阵，负例改造，擦除模式下的约化追踪。
3. verify：穷举验证最大可恢复性、纠删、最小距离、局部性、参数扫描。
4. derive：从 HL 码删符号得到 HDL 码。
5. commands：命令行子命令（由 main.py 挂载）。
"""
