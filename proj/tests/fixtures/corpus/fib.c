int fib(int n) {
	if (n < 2)
		return n;
	return fib(n - 1) + fib(n - 2);
}

int main(void) {
	int i;

	for (i = 0; i < 15; i = i + 1) {
		print_int(fib(i));
		putchar(' ');
	}
	putchar('\n');
	return 0;
}
