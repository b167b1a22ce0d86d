int b_work(int n);

int a_work(int n) {
	int t;

	t = n * 3;
	t = t + 2;
	putchar('a');
	print_int(t);
	return t;
}

int main(void) {
	int i;

	for (i = 0; i < 3; i = i + 1) {
		a_work(i);
		b_work(i);
		putchar('\n');
	}
	return 0;
}
