"""
有限域塔 F_q ⊂ F_{q^m1} ⊂ F_{q^m} 上的精确运算。

本包负责：
1. galois：素数域、扩张域（小域查表、大域多项式运算）、域塔及文本格式。
2. matrix：任一层上的矩阵消元、秩、逆、零空间，以及 k-wise 独立性检查。
3. indep：构造在子域上 k-wise 独立的扩张域元素（BCH 列，退回贪心搜索）。
"""
