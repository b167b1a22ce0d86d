int b_work(int n) {
	int t;

	t = n + 1;
	t = t * 2;
	t = t - 1;
	putchar('b');
	print_int(t);
	return t;
}
