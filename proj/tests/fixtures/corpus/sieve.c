char composite[200];

int main(void) {
	int i, j, count;

	count = 0;
	for (i = 2; i < 200; i++) {
		if (!composite[i]) {
			count++;
			print_int(i);
			putchar(' ');
			for (j = i * i; j < 200; j = j + i)
				composite[j] = 1;
		}
	}
	putchar('\n');
	print_int(count);
	putchar('\n');
	return count;
}
