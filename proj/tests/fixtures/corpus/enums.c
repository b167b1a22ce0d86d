enum light { RED = 1, GREEN, YELLOW = 7, OFF };

typedef enum light light_t;

light_t next(light_t l) {
	if (l == RED)
		return GREEN;
	if (l == GREEN)
		return YELLOW;
	if (l == YELLOW)
		return RED;
	return OFF;
}

int main(void) {
	light_t l = RED;
	int i;

	for (i = 0; i < 7; i++) {
		print_int(l);
		putchar(' ');
		l = next(l);
	}
	print_int(next(OFF));
	putchar('\n');
	return 0;
}
