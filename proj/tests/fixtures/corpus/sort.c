int data[32];

void swap(int *a, int *b) {
	int t = *a;

	*a = *b;
	*b = t;
}

void quicksort(int *v, int n) {
	int i, last;

	if (n <= 1)
		return;
	swap(&v[0], &v[n / 2]);
	last = 0;
	for (i = 1; i < n; i++)
		if (v[i] < v[0])
			swap(&v[++last], &v[i]);
	swap(&v[0], &v[last]);
	quicksort(v, last);
	quicksort(v + last + 1, n - last - 1);
}

int main(void) {
	int i, seed = 7;

	for (i = 0; i < 32; i++) {
		seed = (seed * 1103 + 12345) % 1000;
		data[i] = seed - 500;
	}
	quicksort(data, 32);
	for (i = 0; i < 32; i++) {
		print_int(data[i]);
		if (i % 8 == 7)
			putchar('\n');
		else
			putchar(' ');
	}
	return 0;
}
